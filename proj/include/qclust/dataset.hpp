#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace qclust {

struct FrameShape {
  int height = 0;
  int width = 0;
  bool operator==(const FrameShape&) const = default;
};

// n samples stored as rows of an n x m matrix. Image frames are flattened
// row-major into one row each. Note the convention: some references arrange
// series as *columns* of the data matrix; everything here keeps samples as
// rows and the SVD code transposes internally.
struct Dataset {
  Eigen::MatrixXd data;
  std::optional<std::vector<int>> labels;
  std::optional<FrameShape> frame_shape;

  Eigen::Index n() const { return data.rows(); }
  Eigen::Index m() const { return data.cols(); }
};

// Throws FormatError if the shape/label/finite invariants are violated.
void validate(const Dataset& d);

// Comma-separated values, UTF-8, no header unless skip_header. With
// has_labels the first column must parse as an integer label.
Dataset load_csv(const std::string& path, bool has_labels,
                 bool skip_header = false);

// Binary frame-stack format "FSK1":
//   magic "FSK1" | u32le n_frames | u32le height | u32le width |
//   n_frames*height*width float64le, frame-major then row-major.
Dataset load_frames(const std::string& path);
void write_frames(const std::string& path, const Dataset& d);

enum class StandardizeMode { PerSeries, Global };

// Shift/scale to mean 0, variance 1 (population variance). Constant rows
// become all-zeros; their indices are appended to *constant_rows when given.
Dataset standardize(const Dataset& d,
                    StandardizeMode mode = StandardizeMode::PerSeries,
                    std::vector<Eigen::Index>* constant_rows = nullptr);

// Subtract each row's mean. For near-constant image frames this exposes the
// fluctuation field, which is what direction-based similarity needs.
Dataset center_rows(const Dataset& d);

// Crop every frame to the rectangle [x0,x1) x [y0,y1). Frame datasets only.
Dataset crop_roi(const Dataset& d, int x0, int y0, int x1, int y1);

// FNV-1a over shape, labels and raw value bytes; hex string. Reports embed
// it so that comparisons can detect mismatched inputs.
std::string dataset_digest(const Dataset& d);

}  // namespace qclust
