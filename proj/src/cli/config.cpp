#include "cvcm/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cvcm::cli {

using nlohmann::json;

namespace {

std::string position(std::string_view text, std::size_t byte) {
    long line = 1;
    long column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

// Reads typed fields out of one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.push_back(key);
        return node_.at(key);
    }

    std::string pointer(const std::string& key) const { return path_ + "/" + key; }

    double number(const std::string& key) {
        if (!has(key)) throw ConfigError(pointer(key), "missing required number");
        return number_at(key);
    }

    double number(const std::string& key, double fallback) {
        return has(key) ? number_at(key) : fallback;
    }

    long integer(const std::string& key) {
        if (!has(key)) throw ConfigError(pointer(key), "missing required integer");
        return integer_at(key);
    }

    std::optional<long> optional_integer(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return integer_at(key);
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(pointer(key), "expected true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key) {
        if (!has(key)) throw ConfigError(pointer(key), "missing required string");
        return text_at(key);
    }

    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text_at(key) : fallback;
    }

    Section child(const std::string& key) {
        if (!has(key)) throw ConfigError(pointer(key), "missing required section");
        return Section(raw(key), pointer(key));
    }

    void finish() const {
        for (const auto& item : node_.items()) {
            bool known = false;
            for (const auto& k : seen_) known = known || k == item.key();
            if (!known) throw ConfigError(pointer(item.key()), "unknown field");
        }
    }

private:
    double number_at(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(pointer(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(pointer(key), "expected a finite number");
        return x;
    }

    long integer_at(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(pointer(key), "expected an integer");
        return v.get<long>();
    }

    std::string text_at(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(pointer(key), "expected a string");
        return v.get<std::string>();
    }

    const json& node_;
    std::string path_;
    std::vector<std::string> seen_;
};

SystemSpec parse_system(Section sec) {
    SystemSpec s;
    s.frequency = sec.number("frequency");
    s.temperature = sec.number("temperature");
    sec.finish();
    return s;
}

RingUnitSpec parse_unit(Section sec) {
    RingUnitSpec u;
    const long size = sec.integer("size");
    if (size < 1 || size > 4096) throw ConfigError(sec.pointer("size"), "must be in 1..4096");
    u.size = static_cast<int>(size);
    u.frequency = sec.number("frequency");
    u.internal_coupling = sec.number("internal_coupling", 0.0);
    u.temperature = sec.number("temperature");
    u.force_ring = sec.boolean("force_ring", false);
    sec.finish();
    return u;
}

CouplingSpec parse_coupling(Section sec, int unit_size) {
    CouplingSpec c;
    const std::string kind = sec.text("kind");
    if (kind == "beamsplitter")
        c.kind = CouplingKind::Beamsplitter;
    else if (kind == "spring")
        c.kind = CouplingKind::Spring;
    else
        throw ConfigError(sec.pointer("kind"), "expected \"beamsplitter\" or \"spring\"");

    const std::string strength = sec.text("strength", "raw");
    if (strength == "raw")
        c.semantics = StrengthSemantics::Raw;
    else if (strength == "rescaled")
        c.semantics = StrengthSemantics::Rescaled;
    else
        throw ConfigError(sec.pointer("strength"), "expected \"raw\" or \"rescaled\"");

    if (sec.has("weights")) {
        if (sec.has("mode") || sec.has("value"))
            throw ConfigError(sec.pointer("weights"), "give either weights or mode/value, not both");
        const json& w = sec.raw("weights");
        if (!w.is_array()) throw ConfigError(sec.pointer("weights"), "expected an array");
        SiteWeights sw;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!w[i].is_number())
                throw ConfigError(sec.pointer("weights") + "/" + std::to_string(i),
                                  "expected a number");
            sw.values.push_back(w[i].get<double>());
        }
        if (static_cast<int>(sw.values.size()) != unit_size)
            throw ConfigError(sec.pointer("weights"), "needs " + std::to_string(unit_size) +
                                                          " entries, got " +
                                                          std::to_string(sw.values.size()));
        c.weights = sw;
    } else {
        ModeSelector sel;
        const json& m = sec.has("mode") ? sec.raw("mode") : json("com");
        if (m.is_string()) {
            const auto name = m.get<std::string>();
            if (name == "com")
                sel.mode = 1;
            else if (name == "max")
                sel.mode = max_mode_index(unit_size);
            else
                throw ConfigError(sec.pointer("mode"), "expected \"com\", \"max\" or an index");
        } else if (m.is_number_integer()) {
            sel.mode = m.get<int>();
        } else {
            throw ConfigError(sec.pointer("mode"), "expected \"com\", \"max\" or an index");
        }
        sel.strength = sec.number("value");
        c.weights = sel;
    }
    sec.finish();
    return c;
}

PropagationMode parse_mode(const std::string& name, const std::string& where) {
    if (name == "exact") return PropagationMode::ExactStep;
    if (name == "superoperator") return PropagationMode::SuperoperatorStep;
    if (name == "discrete_recursion") return PropagationMode::DiscreteRecursion;
    if (name == "continuous") return PropagationMode::ContinuousODE;
    throw ConfigError(where,
                      "expected \"exact\", \"superoperator\", \"discrete_recursion\" or \"continuous\"");
}

DrainSpec parse_drain(Section sec) {
    DrainSpec d;
    d.frequency = sec.number("frequency");
    d.temperature = sec.number("temperature");
    d.rate = sec.number("rate");
    sec.finish();
    return d;
}

OutputPaths parse_outputs(Section sec) {
    OutputPaths o;
    o.trajectory = sec.text("trajectory", "");
    o.ledger = sec.text("ledger", "");
    o.summary = sec.text("summary", "");
    o.sweep = sec.text("sweep", "");
    sec.finish();
    return o;
}

SweepSpec parse_sweep_section(Section sec) {
    SweepSpec s;
    s.parameter = sec.text("parameter");
    s.start = sec.number("start");
    s.stop = sec.number("stop");
    s.count = sec.integer("count");
    sec.finish();
    return s;
}

void check_sweep(const SweepSpec& s, const std::string& where) {
    bool known = false;
    for (const auto& p : sweep_parameters()) known = known || p == s.parameter;
    if (!known) throw ConfigError(where, "cannot sweep \"" + s.parameter + "\"");
    if (s.count < 1) throw ConfigError(where, "sweep needs at least one point");
    if (s.count == 1 && s.start != s.stop)
        throw ConfigError(where, "a one-point sweep needs start == stop");
}

} // namespace

std::vector<double> SweepSpec::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0L)));
    for (long k = 0; k < count; ++k)
        out.push_back(count == 1 ? start
                                 : start + (stop - start) * static_cast<double>(k) /
                                               static_cast<double>(count - 1));
    return out;
}

long RunConfig::effective_record_every() const {
    if (record_every) return *record_every;
    if (scenario.mode != PropagationMode::ContinuousODE) return 1;
    const double steps = std::ceil(scenario.horizon() / scenario.integration_step() - 1e-9);
    return std::max(1L, static_cast<long>(std::ceil(steps / 1e4)));
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
        throw ConfigError(position(text, e.byte > 0 ? e.byte - 1 : 0), msg);
    }

    Section root(doc, "");
    RunConfig cfg;
    if (root.has("preset")) cfg.preset = root.text("preset");

    if (cfg.preset) {
        try {
            cfg.scenario = preset_scenario(*cfg.preset);
        } catch (const ModelError& e) {
            throw ConfigError(root.pointer("preset"), e.what());
        }
        for (const char* key : {"system", "unit", "coupling", "dt", "steps", "mode", "drain",
                                "ode_step"})
            if (root.has(key))
                throw ConfigError(root.pointer(key), "preset fixes this field; remove it");
    } else {
        CollisionScenario& s = cfg.scenario;
        s.system = parse_system(root.child("system"));
        s.unit = parse_unit(root.child("unit"));
        s.coupling = parse_coupling(root.child("coupling"), s.unit.size);
        s.dt = root.number("dt");
        s.steps = root.integer("steps");
        s.mode = parse_mode(root.text("mode", "exact"), root.pointer("mode"));
        if (root.has("drain")) s.drain = parse_drain(root.child("drain"));
        if (root.has("ode_step")) s.ode_step = root.number("ode_step");
        if (!(s.dt > 0)) throw ConfigError(root.pointer("dt"), "must be positive");
        if (s.steps < 1) throw ConfigError(root.pointer("steps"), "must be at least 1");
    }

    if (root.has("outputs")) cfg.outputs = parse_outputs(root.child("outputs"));
    cfg.record_every = root.optional_integer("record_every");
    if (cfg.record_every && *cfg.record_every < 1)
        throw ConfigError(root.pointer("record_every"), "must be at least 1");
    if (root.has("sweep")) {
        cfg.sweep = parse_sweep_section(root.child("sweep"));
        check_sweep(*cfg.sweep, root.pointer("sweep"));
    }
    root.finish();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
}

SweepSpec parse_sweep(std::string_view text) {
    const std::string where = "--sweep";
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError(where, "expected <param>=<start>:<stop>:<n>");
    SweepSpec s;
    s.parameter = std::string(text.substr(0, eq));
    std::string rest(text.substr(eq + 1));
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError(where, "expected <param>=<start>:<stop>:<n>");
    try {
        std::size_t used = 0;
        s.start = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        s.stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        s.count = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
        throw ConfigError(where, "cannot read numbers in \"" + rest + "\"");
    }
    check_sweep(s, where);
    return s;
}

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names = {
        "system.frequency",   "system.temperature", "unit.frequency",
        "unit.internal_coupling", "unit.temperature", "coupling.value",
        "dt",                 "drain.frequency",    "drain.temperature",
        "drain.rate",
    };
    return names;
}

void apply_parameter(CollisionScenario& s, std::string_view parameter, double value) {
    if (parameter == "system.frequency") {
        s.system.frequency = value;
    } else if (parameter == "system.temperature") {
        s.system.temperature = value;
    } else if (parameter == "unit.frequency") {
        s.unit.frequency = value;
    } else if (parameter == "unit.internal_coupling") {
        s.unit.internal_coupling = value;
    } else if (parameter == "unit.temperature") {
        s.unit.temperature = value;
    } else if (parameter == "coupling.value") {
        auto* sel = std::get_if<ModeSelector>(&s.coupling.weights);
        if (!sel) throw ConfigError("--sweep", "coupling.value needs a mode selector");
        sel->strength = value;
    } else if (parameter == "dt") {
        s.dt = value;
    } else if (parameter.starts_with("drain.")) {
        if (!s.drain) throw ConfigError("--sweep", "scenario has no drain");
        if (parameter == "drain.frequency")
            s.drain->frequency = value;
        else if (parameter == "drain.temperature")
            s.drain->temperature = value;
        else if (parameter == "drain.rate")
            s.drain->rate = value;
        else
            throw ConfigError("--sweep", "unknown parameter " + std::string(parameter));
    } else {
        throw ConfigError("--sweep", "unknown parameter " + std::string(parameter));
    }
}

CollisionScenario preset_scenario(std::string_view name) {
    CollisionScenario s;
    s.system = {1.0, 1.0};
    if (name == "fig4" || name == "fig5") {
        s.unit = {4, 1.0, 0.67, 1.0, false};
        s.coupling = {CouplingKind::Spring, StrengthSemantics::Raw, ModeSelector{1, 15.0}};
        s.dt = 0.01;
        s.steps = 10000;
        s.mode = PropagationMode::DiscreteRecursion;
        return s;
    }
    if (name == "fig6") {
        s.unit = {4, 1.0, 0.67, 1.0, false};
        s.coupling = {CouplingKind::Spring, StrengthSemantics::Rescaled,
                      ModeSelector{max_mode_index(4), 0.5}};
        s.dt = 0.01;
        s.steps = 10000;
        s.mode = PropagationMode::ContinuousODE;
        return s;
    }
    if (name == "fig2" || name == "fig3")
        throw ModelError("preset " + std::string(name) +
                         " is a parameter sweep; run it with `preset " + std::string(name) + "`");
    throw ModelError("unknown preset \"" + std::string(name) + "\"");
}

} // namespace cvcm::cli
