#pragma once

#include "mfs/types.hpp"

#include <filesystem>
#include <utility>
#include <vector>

namespace mfs {

// Node coordinates of the discretization grid, one row per node.
struct Mesh {
    Matrix coords;  // d_y x d_x

    Index node_count() const { return coords.rows(); }
    Index coord_dim() const { return coords.cols(); }
};

// Snapshots of one fidelity level: inputs (n x d_u), output fields (n x d_y)
// and the shared mesh. fidelity is 1 for high, 2 for low.
struct SnapshotSet {
    Matrix inputs;
    Matrix outputs;
    Mesh mesh;
    int fidelity = 1;

    Index size() const { return inputs.rows(); }
    Index input_dim() const { return inputs.cols(); }
    Index field_dim() const { return outputs.cols(); }
};

// Paired high/low fidelity snapshot sets. common_index lists (hf_row, lf_row)
// pairs whose input rows are identical; with a nested DoE it has n1 entries.
struct MultiFidelityDataset {
    SnapshotSet hf;
    SnapshotSet lf;
    std::vector<std::pair<Index, Index>> common_index;

    Index input_dim() const { return hf.input_dim(); }
};

// Recomputes common_index by exact input-row matching (first unused LF match
// per HF row, in row order).
std::vector<std::pair<Index, Index>> match_common_inputs(const Matrix& hf_inputs,
                                                         const Matrix& lf_inputs);

// Validates dimensions, finiteness and common_index consistency; throws Error
// with row/column context on the first violation.
void validate_dataset(const MultiFidelityDataset& ds);

// Dataset directory layout: manifest.json plus per-fidelity inputs/outputs
// (and optional mesh) matrices as whitespace-delimited text in full double
// precision. load(save(ds)) is bit-exact for finite values.
void save_dataset(const MultiFidelityDataset& ds, const std::filesystem::path& dir);
MultiFidelityDataset load_dataset(const std::filesystem::path& dir);

// Text matrix helpers shared with the bench result files.
void write_matrix(const Matrix& m, const std::filesystem::path& file);
Matrix read_matrix(const std::filesystem::path& file);

}  // namespace mfs
