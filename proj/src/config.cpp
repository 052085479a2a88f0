#include "qchain/config.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qchain/errors.hpp"
#include <nlohmann/json.hpp>

namespace qchain {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError("config error at " + where + ": " + what);
}

const json& member(const json& obj, const std::string& where, const char* key) {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
}

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

std::vector<double> as_number_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(as_number(v, where));
    return out;
}

ChainModel parse_model(const json& j, const std::string& where) {
    check_keys(j, where, {"n_qubits", "topology", "preset", "j", "j_perp", "j_par", "pairs"});
    const int n = as_int(member(j, where, "n_qubits"), where + ".n_qubits");

    Topology topo = Topology::OpenChainNearestNeighbor;
    if (j.contains("topology")) {
        const std::string t = member(j, where, "topology").get<std::string>();
        if (t == "open_chain")
            topo = Topology::OpenChainNearestNeighbor;
        else if (t == "general")
            topo = Topology::GeneralGraph;
        else
            fail(where + ".topology", "expected 'open_chain' or 'general', got '" + t + "'");
    }

    if (j.contains("preset") && j.contains("pairs"))
        fail(where, "give either 'preset' or 'pairs', not both");

    if (j.contains("preset")) {
        const std::string p = j.at("preset").get<std::string>();
        if (p == "heisenberg") {
            return ChainModel::heisenberg_chain(n, as_number(member(j, where, "j"), where + ".j"));
        } else if (p == "xy") {
            const json& jp = member(j, where, "j_perp");
            if (jp.is_array()) return ChainModel::xy_chain(n, as_number_list(jp, where + ".j_perp"));
            return ChainModel::xy_chain(n, std::vector<double>(n - 1, as_number(jp, where)));
        } else if (p == "xxz") {
            return ChainModel::xxz_chain(n, as_number(member(j, where, "j_perp"), where),
                                         as_number(member(j, where, "j_par"), where));
        }
        fail(where + ".preset", "unknown preset '" + p + "'");
    }

    std::vector<Bond> bonds;
    const json& pairs = member(j, where, "pairs");
    if (!pairs.is_array()) fail(where + ".pairs", "expected an array");
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        const std::string pw = where + ".pairs[" + std::to_string(idx) + "]";
        const json& pj = pairs[idx];
        check_keys(pj, pw, {"k", "i", "j_perp", "j_par"});
        Bond b;
        b.k = as_int(member(pj, pw, "k"), pw + ".k");
        b.i = as_int(member(pj, pw, "i"), pw + ".i");
        b.j_perp = as_number(member(pj, pw, "j_perp"), pw + ".j_perp");
        b.j_par = pj.contains("j_par") ? as_number(pj.at("j_par"), pw + ".j_par") : 0.0;
        bonds.push_back(b);
    }
    return ChainModel(n, std::move(bonds), topo);
}

FieldTerm parse_term(const json& j, const std::string& where) {
    const std::string type = member(j, where, "type").get<std::string>();
    if (type == "constant") {
        check_keys(j, where, {"type", "value"});
        return ConstantTerm{as_number(member(j, where, "value"), where + ".value")};
    }
    if (type == "sine_sum") {
        check_keys(j, where, {"type", "amplitude", "signs", "omegas"});
        SineSumTerm t;
        t.amplitude = as_number(member(j, where, "amplitude"), where + ".amplitude");
        t.signs = as_number_list(member(j, where, "signs"), where + ".signs");
        t.omegas = as_number_list(member(j, where, "omegas"), where + ".omegas");
        if (t.signs.size() != t.omegas.size())
            fail(where, "signs and omegas must have equal length");
        return t;
    }
    if (type == "samples") {
        check_keys(j, where, {"type", "t0", "dt", "values"});
        SamplesTerm t;
        t.t0 = as_number(member(j, where, "t0"), where + ".t0");
        t.dt = as_number(member(j, where, "dt"), where + ".dt");
        t.values = as_number_list(member(j, where, "values"), where + ".values");
        return t;
    }
    fail(where + ".type", "unknown term type '" + type + "'");
}

FieldSchedule parse_fields(const json& j, int n_qubits, const std::string& where) {
    FieldSchedule schedule(n_qubits);
    if (j.is_null()) return schedule;
    if (!j.is_array()) fail(where, "expected an array of {qubit, terms} entries");
    for (std::size_t idx = 0; idx < j.size(); ++idx) {
        const std::string ew = where + "[" + std::to_string(idx) + "]";
        const json& ej = j[idx];
        check_keys(ej, ew, {"qubit", "terms"});
        const int q = as_int(member(ej, ew, "qubit"), ew + ".qubit");
        if (q < 1 || q > n_qubits) fail(ew + ".qubit", "outside 1.." + std::to_string(n_qubits));
        const json& terms = member(ej, ew, "terms");
        if (!terms.is_array()) fail(ew + ".terms", "expected an array");
        for (std::size_t ti = 0; ti < terms.size(); ++ti)
            schedule.add_term(q, parse_term(terms[ti], ew + ".terms[" + std::to_string(ti) + "]"));
    }
    return schedule;
}

std::vector<AmplitudeEntry> parse_state(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array");
    std::vector<AmplitudeEntry> out;
    for (std::size_t idx = 0; idx < j.size(); ++idx) {
        const std::string ew = where + "[" + std::to_string(idx) + "]";
        const json& ej = j[idx];
        check_keys(ej, ew, {"label", "amplitude"});
        AmplitudeEntry e;
        e.label = member(ej, ew, "label").get<std::string>();
        const json& amp = member(ej, ew, "amplitude");
        if (amp.is_number())
            e.amplitude = Complex(amp.get<double>(), 0.0);
        else if (amp.is_array() && amp.size() == 2)
            e.amplitude = Complex(as_number(amp[0], ew), as_number(amp[1], ew));
        else
            fail(ew + ".amplitude", "expected a number or [re, im]");
        out.push_back(std::move(e));
    }
    return out;
}

json term_to_json(const FieldTerm& term) {
    return std::visit(
        [](const auto& t) -> json {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, ConstantTerm>)
                return {{"type", "constant"}, {"value", t.value}};
            else if constexpr (std::is_same_v<T, SineSumTerm>)
                return {{"type", "sine_sum"},
                        {"amplitude", t.amplitude},
                        {"signs", t.signs},
                        {"omegas", t.omegas}};
            else
                return {{"type", "samples"}, {"t0", t.t0}, {"dt", t.dt}, {"values", t.values}};
        },
        term);
}

json model_to_json(const ChainModel& m) {
    json pairs = json::array();
    for (const auto& b : m.bonds())
        pairs.push_back({{"k", b.k}, {"i", b.i}, {"j_perp", b.j_perp}, {"j_par", b.j_par}});
    return {{"n_qubits", m.n_qubits()},
            {"topology",
             m.topology() == Topology::OpenChainNearestNeighbor ? "open_chain" : "general"},
            {"pairs", pairs}};
}

json state_to_json(const std::vector<AmplitudeEntry>& entries) {
    json out = json::array();
    for (const auto& e : entries)
        out.push_back(
            {{"label", e.label}, {"amplitude", {e.amplitude.real(), e.amplitude.imag()}}});
    return out;
}

json fields_to_json(const FieldSchedule& s) {
    json out = json::array();
    for (int q = 1; q <= s.n_qubits(); ++q) {
        const auto& terms = s.terms()[q - 1];
        if (terms.empty()) continue;
        json tj = json::array();
        for (const auto& t : terms) tj.push_back(term_to_json(t));
        out.push_back({{"qubit", q}, {"terms", tj}});
    }
    return out;
}

json config_to_json(const ExperimentConfig& cfg) {
    const ExperimentSpec& spec = cfg.experiment;
    json j = {{"model", model_to_json(spec.model)},
              {"fields", fields_to_json(spec.schedule)},
              {"initial_state", state_to_json(spec.initial_state)},
              {"grid", {{"t_end", spec.grid.t_end}, {"n_steps", spec.grid.n_steps}}},
              {"record",
               {{"sigma_z", spec.record.sigma_z},
                {"currents", spec.record.currents},
                {"kinetics", spec.record.kinetics},
                {"snapshots", spec.record.snapshots}}}};
    if (cfg.vl) {
        json vj = {{"aux_model", model_to_json(cfg.vl->aux_model)},
                   {"gauge_qubit", cfg.vl->gauge_qubit},
                   {"epsilon", cfg.vl->epsilon},
                   {"tolerance", cfg.vl->tolerance}};
        if (!cfg.vl->aux_initial_state.empty())
            vj["aux_initial_state"] = state_to_json(cfg.vl->aux_initial_state);
        j["vl"] = vj;
    }
    return j;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "$", {"model", "fields", "initial_state", "grid", "record", "vl"});

    ExperimentConfig cfg{
        ExperimentSpec{parse_model(member(j, "$", "model"), "$.model"), FieldSchedule{}, {},
                       GridSpec{}, RecordFlags{}},
        std::nullopt};
    ExperimentSpec& spec = cfg.experiment;

    spec.schedule = parse_fields(j.contains("fields") ? j.at("fields") : json{},
                                 spec.model.n_qubits(), "$.fields");
    spec.initial_state = parse_state(member(j, "$", "initial_state"), "$.initial_state");

    const json& grid = member(j, "$", "grid");
    check_keys(grid, "$.grid", {"t_end", "n_steps"});
    spec.grid.t_end = as_number(member(grid, "$.grid", "t_end"), "$.grid.t_end");
    spec.grid.n_steps = as_int(member(grid, "$.grid", "n_steps"), "$.grid.n_steps");
    if (spec.grid.n_steps < 1) fail("$.grid.n_steps", "must be >= 1");
    if (!(spec.grid.t_end > 0.0)) fail("$.grid.t_end", "must be > 0");

    if (j.contains("record")) {
        const json& r = j.at("record");
        check_keys(r, "$.record", {"sigma_z", "currents", "kinetics", "snapshots"});
        auto flag = [&](const char* key, bool dflt) {
            return r.contains(key) ? r.at(key).get<bool>() : dflt;
        };
        spec.record.sigma_z = flag("sigma_z", true);
        spec.record.currents = flag("currents", true);
        spec.record.kinetics = flag("kinetics", true);
        spec.record.snapshots = flag("snapshots", false);
    }

    // validate the initial state (labels, duplicates, renormalization)
    (void)build_initial_state(spec);

    if (j.contains("vl")) {
        const json& vj = j.at("vl");
        check_keys(vj, "$.vl",
                   {"aux_model", "aux_initial_state", "gauge_qubit", "epsilon", "tolerance"});
        VLConfig vl{parse_model(member(vj, "$.vl", "aux_model"), "$.vl.aux_model"), {}, 1, 1e-8,
                    1e-3};
        if (vj.contains("aux_initial_state"))
            vl.aux_initial_state = parse_state(vj.at("aux_initial_state"), "$.vl.aux_initial_state");
        if (vj.contains("gauge_qubit"))
            vl.gauge_qubit = as_int(vj.at("gauge_qubit"), "$.vl.gauge_qubit");
        if (vj.contains("epsilon")) vl.epsilon = as_number(vj.at("epsilon"), "$.vl.epsilon");
        if (vj.contains("tolerance"))
            vl.tolerance = as_number(vj.at("tolerance"), "$.vl.tolerance");

        if (!spec.model.is_nearest_neighbor_chain() || !vl.aux_model.is_nearest_neighbor_chain())
            fail("$.vl", "VL jobs require open nearest-neighbor chains on both sides");
        if (vl.aux_model.n_qubits() != spec.model.n_qubits())
            fail("$.vl.aux_model", "auxiliary model size differs from the reference");
        if (vl.gauge_qubit < 1 || vl.gauge_qubit > spec.model.n_qubits())
            fail("$.vl.gauge_qubit", "outside 1.." + std::to_string(spec.model.n_qubits()));
        if (!(vl.epsilon > 0.0)) fail("$.vl.epsilon", "must be > 0");
        if (!vl.aux_initial_state.empty())
            (void)build_initial_state(vl.aux_initial_state, spec.model.n_qubits());
        cfg.vl = std::move(vl);
    }
    return cfg;
}

ExperimentSpec parse_experiment(const std::string& json_text) {
    return parse_config(json_text).experiment;
}

std::string serialize_config(const ExperimentConfig& config) {
    return config_to_json(config).dump(2) + "\n";
}

std::string serialize_experiment(const ExperimentSpec& spec) {
    return serialize_config({spec, std::nullopt});
}

std::string config_digest(const ExperimentConfig& config) {
    const std::string dump = config_to_json(config).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

const char* kPaperFig3 = R"json({
  "model": {"n_qubits": 3, "preset": "heisenberg", "j": 0.5},
  "fields": [
    {"qubit": 1, "terms": [{"type": "sine_sum", "amplitude": 0.6,
                            "signs": [1, -1, 1, -1], "omegas": [1, 3, 5, 7]}]},
    {"qubit": 3, "terms": [{"type": "sine_sum", "amplitude": 0.6,
                            "signs": [1, 1, 1, 1], "omegas": [2, 4, 6, 8]}]}
  ],
  "initial_state": [
    {"label": "011", "amplitude": 0.57735026918962573},
    {"label": "101", "amplitude": 0.57735026918962573},
    {"label": "110", "amplitude": 0.57735026918962573}
  ],
  "grid": {"t_end": 1.5, "n_steps": 10000},
  "record": {"sigma_z": true, "currents": true, "kinetics": true, "snapshots": false}
})json";

const char* kPaperFig3Xy = R"json({
  "model": {"n_qubits": 3, "preset": "heisenberg", "j": 0.5},
  "fields": [
    {"qubit": 1, "terms": [{"type": "sine_sum", "amplitude": 0.6,
                            "signs": [1, -1, 1, -1], "omegas": [1, 3, 5, 7]}]},
    {"qubit": 3, "terms": [{"type": "sine_sum", "amplitude": 0.6,
                            "signs": [1, 1, 1, 1], "omegas": [2, 4, 6, 8]}]}
  ],
  "initial_state": [
    {"label": "011", "amplitude": 0.57735026918962573},
    {"label": "101", "amplitude": 0.57735026918962573},
    {"label": "110", "amplitude": 0.57735026918962573}
  ],
  "grid": {"t_end": 1.5, "n_steps": 10000},
  "record": {"sigma_z": true, "currents": true, "kinetics": true, "snapshots": false},
  "vl": {
    "aux_model": {"n_qubits": 3, "preset": "xy", "j_perp": [1.2, -1.0]},
    "gauge_qubit": 2,
    "epsilon": 1e-08,
    "tolerance": 0.001
  }
})json";

} // namespace

std::string embedded_config(const std::string& name) {
    if (name == "paper_fig3") return kPaperFig3;
    if (name == "paper_fig3_xy") return kPaperFig3Xy;
    return {};
}

ExperimentConfig load_config(const std::string& path_or_name) {
    if (std::filesystem::exists(path_or_name)) {
        std::ifstream in(path_or_name);
        if (!in) throw ValidationError("cannot read config file: " + path_or_name);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }
    const std::string text = embedded_config(path_or_name);
    if (text.empty())
        throw ValidationError("config not found: '" + path_or_name +
                              "' is neither a file nor a shipped preset");
    return parse_config(text);
}

} // namespace qchain
