#include "kaclab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kaclab {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_table_csv(const std::filesystem::path& path, const DensityTable& table) {
    std::string text = "index,value,stderr\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        text += std::to_string(i);
        text += ',';
        text += format_double(table[i]);
        text += ',';
        text += table.stderr_values.empty() ? "0" : format_double(table.stderr_values[i]);
        text += '\n';
    }
    write_text(path, text);
}

DensityTable read_table_csv(const std::filesystem::path& path, unsigned order,
                            std::size_t cells_per_slot) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    DensityTable table(order, cells_per_slot);
    table.stderr_values.assign(table.size(), 0.0);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t idx = 0;
        double value = 0.0, se = 0.0;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf", &idx, &value, &se) < 2)
            throw std::runtime_error("bad table row in " + path.string());
        table[idx] = value;
        table.stderr_values[idx] = se;
    }
    return table;
}

nlohmann::json table_sidecar(const DensityTable& table, const GridSpec& grid, double mu,
                             double t) {
    nlohmann::json j;
    j["order"] = table.order();
    j["cells_per_slot"] = table.cells_per_slot();
    j["grid"] = grid_to_json(grid);
    j["mu"] = mu;
    j["t"] = t;
    j["truncation_mass"] = table.truncation_mass;
    j["total_mass"] = table.total_mass();
    return j;
}

void write_reference_csv(const std::filesystem::path& path, const DensityTable& table,
                         const GridSpec& grid) {
    if (table.order() != 1)
        throw std::invalid_argument("write_reference_csv: order-1 tables only");
    const int d = grid.is_labels() ? 1 : grid.dimension();
    std::string text;
    if (d == 1) text = "b0,value,stderr\n";
    else text = "b0,b1,b2,value,stderr\n";
    const int bins = grid.is_labels() ? static_cast<int>(grid.cell_count()) : grid.bins_per_axis();
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto rest = static_cast<long>(i);
        int b[3] = {0, 0, 0};
        for (int axis = d - 1; axis >= 0; --axis) {
            b[axis] = static_cast<int>(rest % bins);
            rest /= bins;
        }
        for (int axis = 0; axis < d; ++axis) {
            text += std::to_string(b[axis]);
            text += ',';
        }
        text += format_double(table[i]);
        text += ',';
        text += table.stderr_values.empty() ? "0" : format_double(table.stderr_values[i]);
        text += '\n';
    }
    write_text(path, text);
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok) throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
}

nlohmann::json kernel_to_json(const Kernel& kernel) {
    nlohmann::json j;
    switch (kernel.kind()) {
        case Kernel::Kind::maxwell: j["kind"] = "maxwell"; break;
        case Kernel::Kind::truncated_hard_sphere: j["kind"] = "truncated_hard_sphere"; break;
        case Kernel::Kind::custom: j["kind"] = "custom"; break;
    }
    j["dimension"] = kernel.dimension();
    j["b0"] = kernel.b0();
    if (kernel.kind() == Kernel::Kind::truncated_hard_sphere) j["v_cap"] = kernel.v_cap();
    return j;
}

Kernel kernel_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"kind", "dimension", "b0", "v_cap"}, "kernel");
    const std::string kind = j.at("kind").get<std::string>();
    const int d = j.at("dimension").get<int>();
    if (kind == "maxwell") {
        return Kernel::maxwell(d, j.value("b0", -1.0));
    }
    if (kind == "truncated_hard_sphere") {
        return Kernel::truncated_hard_sphere(d, j.at("b0").get<double>(),
                                             j.at("v_cap").get<double>());
    }
    throw std::invalid_argument("kernel: unknown kind '" + kind + "' (custom kernels are code-only)");
}

nlohmann::json density_to_json(const InitialDensity& f0) {
    nlohmann::json j;
    switch (f0.kind()) {
        case InitialDensity::Kind::gaussian: {
            j["kind"] = "gaussian";
            j["sigma"] = f0.components()[0].sigma;
            j["dimension"] = f0.dimension();
            break;
        }
        case InitialDensity::Kind::mixture: {
            const auto comps = f0.components();
            j["kind"] = "mixture";
            j["w1"] = comps[0].weight;
            j["sigma1"] = comps[0].sigma;
            j["sigma2"] = comps[1].sigma;
            j["dimension"] = f0.dimension();
            break;
        }
        case InitialDensity::Kind::discrete: {
            j["kind"] = "discrete";
            j["values"] = f0.atom_values();
            j["pmf"] = f0.atom_pmf();
            break;
        }
    }
    return j;
}

InitialDensity density_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"kind", "sigma", "w1", "sigma1", "sigma2", "dimension", "values", "pmf"},
                        "initial_density");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian")
        return InitialDensity::gaussian(j.value("dimension", 3), j.at("sigma").get<double>());
    if (kind == "mixture")
        return InitialDensity::mixture(j.value("dimension", 3), j.at("w1").get<double>(),
                                       j.at("sigma1").get<double>(),
                                       j.at("sigma2").get<double>());
    if (kind == "discrete")
        return InitialDensity::discrete(j.at("values").get<std::vector<double>>(),
                                        j.at("pmf").get<std::vector<double>>());
    throw std::invalid_argument("initial_density: unknown kind '" + kind + "'");
}

nlohmann::json grid_to_json(const GridSpec& grid) {
    nlohmann::json j;
    if (grid.is_labels()) {
        j["kind"] = "labels";
        j["values"] = grid.label_values();
    } else {
        j["kind"] = "uniform";
        j["dimension"] = grid.dimension();
        j["bins"] = grid.bins_per_axis();
        j["v_max"] = grid.v_max();
    }
    return j;
}

GridSpec grid_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"kind", "dimension", "bins", "v_max", "values"}, "grid");
    const std::string kind = j.value("kind", "uniform");
    if (kind == "labels") return GridSpec::labels(j.at("values").get<std::vector<double>>());
    return GridSpec::uniform(j.value("dimension", 1), j.at("bins").get<int>(),
                             j.at("v_max").get<double>());
}

nlohmann::json ensemble_to_json(const EnsembleSpec& spec) {
    nlohmann::json j;
    j["mu"] = spec.mu;
    j["replicas"] = spec.replicas;
    j["mode"] = spec.mode == EnsembleMode::grand_canonical ? "grand_canonical" : "canonical";
    j["seed"] = spec.seed;
    j["t_final"] = spec.t_final;
    j["kernel"] = kernel_to_json(spec.kernel);
    j["initial_density"] = density_to_json(spec.f0);
    return j;
}

EnsembleSpec ensemble_from_json(const nlohmann::json& j) {
    reject_unknown_keys(
        j, {"mu", "replicas", "mode", "seed", "t_final", "kernel", "initial_density"},
        "ensemble");
    EnsembleSpec spec;
    spec.mu = j.at("mu").get<double>();
    spec.replicas = j.at("replicas").get<std::uint64_t>();
    const std::string mode = j.value("mode", "grand_canonical");
    if (mode == "grand_canonical") spec.mode = EnsembleMode::grand_canonical;
    else if (mode == "canonical") spec.mode = EnsembleMode::canonical;
    else throw std::invalid_argument("ensemble: unknown mode '" + mode + "'");
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.t_final = j.value("t_final", 0.0);
    spec.kernel = kernel_from_json(j.at("kernel"));
    spec.f0 = density_from_json(j.at("initial_density"));
    spec.validate();
    return spec;
}

std::uint64_t config_hash(const nlohmann::json& j) {
    const std::string canon = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace kaclab
