#include "mfs/dataset.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mfs {

namespace {

void check_finite(const Matrix& m, const std::string& what) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j)))
                throw Error(what + ": non-finite value at row " + std::to_string(i) +
                            ", column " + std::to_string(j));
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::pair<Index, Index>> match_common_inputs(const Matrix& hf_inputs,
                                                         const Matrix& lf_inputs) {
    std::vector<std::pair<Index, Index>> common;
    std::vector<bool> used(static_cast<std::size_t>(lf_inputs.rows()), false);
    for (Index i = 0; i < hf_inputs.rows(); ++i) {
        for (Index j = 0; j < lf_inputs.rows(); ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            if (hf_inputs.row(i) == lf_inputs.row(j)) {
                common.emplace_back(i, j);
                used[static_cast<std::size_t>(j)] = true;
                break;
            }
        }
    }
    return common;
}

void validate_dataset(const MultiFidelityDataset& ds) {
    for (const SnapshotSet* s : {&ds.hf, &ds.lf}) {
        const std::string tag = s->fidelity == 1 ? "hf" : "lf";
        if (s->size() < 1) throw Error(tag + ": n must be >= 1");
        if (s->inputs.rows() != s->outputs.rows())
            throw Error(tag + ": inputs and outputs row counts differ");
        if (s->mesh.node_count() > 0 && s->mesh.node_count() != s->field_dim())
            throw Error(tag + ": mesh node count does not match field dimension");
        check_finite(s->inputs, tag + " inputs");
        check_finite(s->outputs, tag + " outputs");
        if (s->mesh.node_count() > 0) check_finite(s->mesh.coords, tag + " mesh");
    }
    if (ds.hf.input_dim() != ds.lf.input_dim())
        throw Error("dataset: hf/lf input dimension mismatch");
    for (const auto& [i, j] : ds.common_index) {
        if (i < 0 || i >= ds.hf.size() || j < 0 || j >= ds.lf.size())
            throw Error("dataset: common_index entry out of range");
        if ((ds.hf.inputs.row(i) - ds.lf.inputs.row(j)).lpNorm<Eigen::Infinity>() > 1e-12)
            throw Error("dataset: common_index pair (" + std::to_string(i) + "," +
                        std::to_string(j) + ") input rows differ");
    }
}

void write_matrix(const Matrix& m, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("cannot open for writing: " + file.string());
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << fmt_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + file.string());
}

Matrix read_matrix(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open: " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    Index ncols = -1;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (!ss.eof())
            throw Error(file.string() + ": malformed number at line " + std::to_string(lineno));
        if (row.empty()) continue;
        if (ncols < 0) ncols = static_cast<Index>(row.size());
        else if (static_cast<Index>(row.size()) != ncols)
            throw Error(file.string() + ": inconsistent column count at line " +
                        std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(file.string() + ": empty matrix");
    Matrix m(static_cast<Index>(rows.size()), ncols);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < ncols; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void save_dataset(const MultiFidelityDataset& ds, const fs::path& dir) {
    validate_dataset(ds);
    fs::create_directories(dir);

    json man;
    man["d_u"] = ds.hf.input_dim();
    man["d_x"] = ds.hf.mesh.node_count() > 0 ? ds.hf.mesh.coord_dim() : 0;
    man["fidelities"] = json::array();
    for (const SnapshotSet* s : {&ds.hf, &ds.lf}) {
        json f;
        f["level"] = s->fidelity;
        f["n"] = s->size();
        f["d_y"] = s->field_dim();
        f["has_mesh"] = s->mesh.node_count() > 0;
        man["fidelities"].push_back(f);
    }
    std::ofstream mo(dir / "manifest.json");
    mo << man.dump(2) << '\n';
    if (!mo) throw Error("write failed: " + (dir / "manifest.json").string());

    const char* prefix[2] = {"hf", "lf"};
    const SnapshotSet* sets[2] = {&ds.hf, &ds.lf};
    for (int k = 0; k < 2; ++k) {
        write_matrix(sets[k]->inputs, dir / (std::string(prefix[k]) + "_inputs.txt"));
        write_matrix(sets[k]->outputs, dir / (std::string(prefix[k]) + "_outputs.txt"));
        if (sets[k]->mesh.node_count() > 0)
            write_matrix(sets[k]->mesh.coords, dir / (std::string(prefix[k]) + "_mesh.txt"));
    }
}

MultiFidelityDataset load_dataset(const fs::path& dir) {
    std::ifstream mi(dir / "manifest.json");
    if (!mi) throw Error("cannot open: " + (dir / "manifest.json").string());
    json man;
    try {
        mi >> man;
    } catch (const json::exception& e) {
        throw Error("malformed manifest.json: " + std::string(e.what()));
    }

    MultiFidelityDataset ds;
    ds.hf.fidelity = 1;
    ds.lf.fidelity = 2;
    const char* prefix[2] = {"hf", "lf"};
    SnapshotSet* sets[2] = {&ds.hf, &ds.lf};
    for (int k = 0; k < 2; ++k) {
        sets[k]->inputs = read_matrix(dir / (std::string(prefix[k]) + "_inputs.txt"));
        sets[k]->outputs = read_matrix(dir / (std::string(prefix[k]) + "_outputs.txt"));
        const fs::path meshfile = dir / (std::string(prefix[k]) + "_mesh.txt");
        if (fs::exists(meshfile)) sets[k]->mesh.coords = read_matrix(meshfile);
    }

    // cross-check declared shapes
    for (const auto& f : man.at("fidelities")) {
        const int level = f.at("level").get<int>();
        const SnapshotSet* s = level == 1 ? &ds.hf : &ds.lf;
        if (f.at("n").get<Index>() != s->size())
            throw Error("manifest/file mismatch: fidelity " + std::to_string(level) +
                        " declares n=" + std::to_string(f.at("n").get<Index>()) + " but files have " +
                        std::to_string(s->size()) + " rows");
        if (f.at("d_y").get<Index>() != s->field_dim())
            throw Error("manifest/file mismatch: fidelity " + std::to_string(level) + " d_y");
    }
    if (man.at("d_u").get<Index>() != ds.hf.input_dim())
        throw Error("manifest/file mismatch: d_u");

    ds.common_index = match_common_inputs(ds.hf.inputs, ds.lf.inputs);
    validate_dataset(ds);
    return ds;
}

}  // namespace mfs
