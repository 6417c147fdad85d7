#include "mhdbl/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

std::string num_str(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct Violation {
    std::string field;
    std::string message;  ///< starts with the offending value, or with "must"/"entry"/"list"

    std::string text() const {
        const bool bare = message.rfind("must", 0) == 0 || message.rfind("entry", 0) == 0 || message.rfind("list", 0) == 0;
        return field + (bare ? " " : " = ") + message;
    }
};

/// Field-level and cross-field rules; field is "block.key".
std::vector<Violation> violations(const RunConfig& c) {
    std::vector<Violation> v;
    auto range = [&](const char* field, double x, double lo, double hi) {
        if (!(x >= lo && x <= hi))
            v.push_back({field, num_str(x) + " must lie in [" + num_str(lo) + ", " + num_str(hi) + "]"});
    };
    auto positive = [&](const char* field, double x) {
        if (!(x > 0.0) || !std::isfinite(x)) v.push_back({field, num_str(x) + " must be positive and finite"});
    };

    if (c.grid.nx < 4 || c.grid.nx % 2 != 0)
        v.push_back({"grid.nx", std::to_string(c.grid.nx) + " must be even and >= 4"});
    if (c.grid.ny < 8) v.push_back({"grid.ny", std::to_string(c.grid.ny) + " must be >= 8"});
    positive("grid.lx", c.grid.lx);
    positive("grid.y_max", c.grid.y_max);
    range("grid.stretch", c.grid.stretch, 0.0, 20.0);

    positive("solver.dt", c.solver.dt);
    if (!(c.solver.t_max >= 0.0)) v.push_back({"solver.t_max", num_str(c.solver.t_max) + " must be >= 0"});
    positive("solver.blowup_threshold", c.solver.blowup_threshold);
    if (!(c.norm_cap > 1.0)) v.push_back({"solver.norm_cap", num_str(c.norm_cap) + " must exceed 1"});
    if (c.solver.dt > c.solver.t_max && c.solver.t_max > 0.0)
        v.push_back({"solver.dt", num_str(c.solver.dt) + " exceeds solver.t_max = " + num_str(c.solver.t_max)});

    if (!std::isfinite(c.b_bar)) v.push_back({"physics.b_bar", "must be finite"});
    positive("physics.u_bar", c.u_bar);

    positive("norms.tau0", c.tau0);
    range("norms.alpha", c.alpha, 0.25, 0.5);
    if (c.m_max < 1 || c.m_max > 400) v.push_back({"norms.m_max", std::to_string(c.m_max) + " must lie in [1, 400]"});

    if (c.epsilon.empty()) v.push_back({"lifespan.epsilon", "list must not be empty"});
    for (double e : c.epsilon)
        if (!(e >= 0.0 && e < 1.0)) v.push_back({"lifespan.epsilon", "entry " + num_str(e) + " must lie in [0, 1)"});
    if (c.sweep_b_bar.empty()) v.push_back({"lifespan.b_bar", "list must not be empty"});
    for (double b : c.sweep_b_bar)
        if (!std::isfinite(b)) v.push_back({"lifespan.b_bar", "entries must be finite"});
    if (c.c0_source == C0Source::Fixed && !(c.c0 >= 0.0))
        v.push_back({"lifespan.c0", num_str(c.c0) + " must be >= 0"});
    positive("lifespan.c_bar", c.c_bar);
    positive("lifespan.c_shear", c.c_shear);
    positive("lifespan.calibration_time", c.calibration_time);
    if (c.calibration_time < c.solver.dt)
        v.push_back({"lifespan.calibration_time", num_str(c.calibration_time) + " is shorter than solver.dt"});
    if (c.modes < 1) v.push_back({"lifespan.modes", std::to_string(c.modes) + " must be >= 1"});
    if (c.modes > static_cast<int>(c.grid.nx) / 2 - 1)
        v.push_back({"lifespan.modes", std::to_string(c.modes) + " exceeds the resolved modes of grid.nx = " +
                                           std::to_string(c.grid.nx)});

    if (c.trace_every < 1) v.push_back({"io.trace_every", "must be >= 1"});
    if (c.out.empty()) v.push_back({"io.out", "must not be empty"});

    if (!(c.shear.t0 >= 1.0)) v.push_back({"shear.t0", num_str(c.shear.t0) + " must be >= 1"});
    if (!(c.shear.t1 >= 10.0 * c.shear.t0))
        v.push_back({"shear.t1", num_str(c.shear.t1) + " must be >= 10 shear.t0"});
    if (c.shear.samples < 20) v.push_back({"shear.samples", std::to_string(c.shear.samples) + " must be >= 20"});
    if (c.shear.ny < 8) v.push_back({"shear.ny", std::to_string(c.shear.ny) + " must be >= 8"});
    range("shear.stretch", c.shear.stretch, 0.0, 20.0);
    positive("shear.y_factor", c.shear.y_factor);

    if (c.verify.samples < 1) v.push_back({"verify.samples", "must be >= 1"});
    return v;
}

class Parser {
public:
    Parser(std::string origin) : origin_(std::move(origin)) {}

    RunConfig parse(const std::string& text) {
        YAML::Node root;
        try {
            root = YAML::Load(text);
        } catch (const YAML::Exception& e) {
            throw ConfigError(where(e.mark.line) + "YAML syntax: " + e.msg);
        }
        RunConfig c;
        if (!root || root.IsNull()) return c;
        if (!root.IsMap()) fail(root, "top level must be a mapping of blocks");
        for (auto it = root.begin(); it != root.end(); ++it) {
            const std::string block = it->first.as<std::string>();
            const YAML::Node& body = it->second;
            if (body.IsNull()) continue;
            if (!body.IsMap()) fail(body, block + " must be a mapping");
            if (block == "grid") grid(c, body);
            else if (block == "solver") solver(c, body);
            else if (block == "physics") physics(c, body);
            else if (block == "norms") norms(c, body);
            else if (block == "lifespan") lifespan(c, body);
            else if (block == "io") io(c, body);
            else if (block == "shear") shear(c, body);
            else if (block == "verify") verify(c, body);
            else fail(it->first, "unknown block '" + block + "'");
        }
        for (const Violation& v : violations(c)) {
            auto at = lines_.find(v.field);
            throw ConfigError(where(at == lines_.end() ? -1 : at->second) + v.text());
        }
        return c;
    }

private:
    using Handler = std::function<void(const YAML::Node&)>;

    std::string where(int line) const {
        return line >= 0 ? origin_ + ":" + std::to_string(line + 1) + ": " : origin_ + ": ";
    }

    [[noreturn]] void fail(const YAML::Node& n, const std::string& what) const {
        throw ConfigError(where(n.Mark().line) + what);
    }

    void keys(const std::string& block, const YAML::Node& body, const std::map<std::string, Handler>& handlers) {
        for (auto it = body.begin(); it != body.end(); ++it) {
            const std::string key = it->first.as<std::string>();
            auto h = handlers.find(key);
            if (h == handlers.end()) {
                std::string known;
                for (const auto& [k, _] : handlers) known += (known.empty() ? "" : ", ") + k;
                fail(it->first, "unknown key " + block + "." + key + " (expected one of: " + known + ")");
            }
            field_ = block + "." + key;
            lines_[field_] = it->second.Mark().line;
            h->second(it->second);
        }
    }

    double number(const YAML::Node& n) const {
        if (!n.IsScalar()) fail(n, field_ + " must be a number");
        try {
            return n.as<double>();
        } catch (const YAML::Exception&) {
            fail(n, field_ + " = '" + n.Scalar() + "' is not a number");
        }
    }

    long long integer(const YAML::Node& n) const {
        const double x = number(n);
        if (x != std::floor(x) || std::abs(x) > 9e15) fail(n, field_ + " = " + n.Scalar() + " must be an integer");
        return static_cast<long long>(x);
    }

    std::size_t count(const YAML::Node& n) const {
        const long long k = integer(n);
        if (k < 0) fail(n, field_ + " = " + n.Scalar() + " must be >= 0");
        return static_cast<std::size_t>(k);
    }

    std::string text(const YAML::Node& n) const {
        if (!n.IsScalar()) fail(n, field_ + " must be a string");
        return n.Scalar();
    }

    std::vector<double> numbers(const YAML::Node& n) {
        std::vector<double> out;
        if (n.IsScalar()) {
            out.push_back(number(n));
            return out;
        }
        if (!n.IsSequence()) fail(n, field_ + " must be a number or a list of numbers");
        for (const YAML::Node& e : n) out.push_back(number(e));
        return out;
    }

    void grid(RunConfig& c, const YAML::Node& b) {
        keys("grid", b,
             {{"nx", [&](const YAML::Node& n) { c.grid.nx = count(n); }},
              {"ny", [&](const YAML::Node& n) { c.grid.ny = count(n); }},
              {"lx", [&](const YAML::Node& n) { c.grid.lx = number(n); }},
              {"y_max", [&](const YAML::Node& n) { c.grid.y_max = number(n); }},
              {"stretch", [&](const YAML::Node& n) { c.grid.stretch = number(n); }}});
    }

    void solver(RunConfig& c, const YAML::Node& b) {
        keys("solver", b,
             {{"dt", [&](const YAML::Node& n) { c.solver.dt = number(n); }},
              {"t_max", [&](const YAML::Node& n) { c.solver.t_max = number(n); }},
              {"scheme",
               [&](const YAML::Node& n) {
                   const std::string s = text(n);
                   if (s == "imex-cn") c.solver.scheme = Scheme::ImexCN;
                   else if (s == "explicit") c.solver.scheme = Scheme::Explicit;
                   else fail(n, field_ + " = '" + s + "' must be imex-cn or explicit");
               }},
              {"blowup_threshold", [&](const YAML::Node& n) { c.solver.blowup_threshold = number(n); }},
              {"norm_cap", [&](const YAML::Node& n) { c.norm_cap = number(n); }}});
    }

    void physics(RunConfig& c, const YAML::Node& b) {
        keys("physics", b,
             {{"b_bar", [&](const YAML::Node& n) { c.b_bar = number(n); }},
              {"u_bar", [&](const YAML::Node& n) { c.u_bar = number(n); }},
              {"shear", [&](const YAML::Node& n) {
                   const std::string s = text(n);
                   if (s == "erf") c.datum = ShearDatum::Erf;
                   else if (s == "cutoff") c.datum = ShearDatum::Cutoff;
                   else fail(n, field_ + " = '" + s + "' must be erf or cutoff");
               }}});
    }

    void norms(RunConfig& c, const YAML::Node& b) {
        keys("norms", b,
             {{"tau0", [&](const YAML::Node& n) { c.tau0 = number(n); }},
              {"alpha", [&](const YAML::Node& n) { c.alpha = number(n); }},
              {"m_max", [&](const YAML::Node& n) { c.m_max = static_cast<int>(integer(n)); }}});
    }

    void lifespan(RunConfig& c, const YAML::Node& b) {
        keys("lifespan", b,
             {{"epsilon", [&](const YAML::Node& n) { c.epsilon = numbers(n); }},
              {"b_bar", [&](const YAML::Node& n) { c.sweep_b_bar = numbers(n); }},
              {"c0",
               [&](const YAML::Node& n) {
                   if (!n.IsScalar()) fail(n, field_ + " must be monitor, quadratic or a number");
                   const std::string s = n.Scalar();
                   if (s == "monitor") c.c0_source = C0Source::Monitor;
                   else if (s == "quadratic") c.c0_source = C0Source::Quadratic;
                   else {
                       double x = 0.0;
                       try {
                           x = n.as<double>();
                       } catch (const YAML::Exception&) {
                           fail(n, field_ + " = '" + s + "' must be monitor, quadratic or a number");
                       }
                       c.c0_source = C0Source::Fixed;
                       c.c0 = x;
                   }
               }},
              {"c_bar", [&](const YAML::Node& n) { c.c_bar = number(n); }},
              {"c_shear", [&](const YAML::Node& n) { c.c_shear = number(n); }},
              {"calibration_time", [&](const YAML::Node& n) { c.calibration_time = number(n); }},
              {"modes", [&](const YAML::Node& n) { c.modes = static_cast<int>(integer(n)); }}});
    }

    void io(RunConfig& c, const YAML::Node& b) {
        keys("io", b,
             {{"out", [&](const YAML::Node& n) { c.out = text(n); }},
              {"checkpoint_every", [&](const YAML::Node& n) { c.checkpoint_every = count(n); }},
              {"trace_every", [&](const YAML::Node& n) { c.trace_every = count(n); }},
              {"seed", [&](const YAML::Node& n) { c.seed = count(n); }}});
    }

    void shear(RunConfig& c, const YAML::Node& b) {
        keys("shear", b,
             {{"t0", [&](const YAML::Node& n) { c.shear.t0 = number(n); }},
              {"t1", [&](const YAML::Node& n) { c.shear.t1 = number(n); }},
              {"samples", [&](const YAML::Node& n) { c.shear.samples = static_cast<int>(integer(n)); }},
              {"ny", [&](const YAML::Node& n) { c.shear.ny = count(n); }},
              {"stretch", [&](const YAML::Node& n) { c.shear.stretch = number(n); }},
              {"y_factor", [&](const YAML::Node& n) { c.shear.y_factor = number(n); }}});
    }

    void verify(RunConfig& c, const YAML::Node& b) {
        keys("verify", b, {{"samples", [&](const YAML::Node& n) { c.verify.samples = count(n); }}});
    }

    std::string origin_;
    std::string field_;
    std::map<std::string, int> lines_;
};

const char* scheme_name(Scheme s) { return s == Scheme::ImexCN ? "imex-cn" : "explicit"; }

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    return Parser(origin).parse(text);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

void check_config(const RunConfig& c) {
    const auto v = violations(c);
    if (!v.empty()) throw ConfigError(v.front().text());
    try {
        for (double e : c.epsilon)
            for (double b : c.sweep_b_bar) experiment_config(c, e, b).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

nlohmann::json config_json(const RunConfig& c) {
    nlohmann::json c0;
    if (c.c0_source == C0Source::Monitor) c0 = "monitor";
    else if (c.c0_source == C0Source::Quadratic) c0 = "quadratic";
    else c0 = c.c0;
    return {
        {"grid", {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"lx", c.grid.lx}, {"y_max", c.grid.y_max},
                  {"stretch", c.grid.stretch}}},
        {"solver", {{"dt", c.solver.dt}, {"t_max", c.solver.t_max}, {"scheme", scheme_name(c.solver.scheme)},
                    {"blowup_threshold", c.solver.blowup_threshold}, {"norm_cap", c.norm_cap}}},
        {"physics", {{"b_bar", c.b_bar}, {"u_bar", c.u_bar},
                     {"shear", c.datum == ShearDatum::Cutoff ? "cutoff" : "erf"}}},
        {"norms", {{"tau0", c.tau0}, {"alpha", c.alpha}, {"m_max", c.m_max}}},
        {"lifespan", {{"epsilon", c.epsilon}, {"b_bar", c.sweep_b_bar}, {"c0", c0}, {"c_bar", c.c_bar},
                      {"c_shear", c.c_shear}, {"calibration_time", c.calibration_time}, {"modes", c.modes}}},
        {"io", {{"out", c.out.string()}, {"checkpoint_every", c.checkpoint_every}, {"trace_every", c.trace_every},
                {"seed", c.seed}}},
        {"shear", {{"t0", c.shear.t0}, {"t1", c.shear.t1}, {"samples", c.shear.samples}, {"ny", c.shear.ny},
                   {"stretch", c.shear.stretch}, {"y_factor", c.shear.y_factor}}},
        {"verify", {{"samples", c.verify.samples}}},
    };
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig experiment_config(const RunConfig& c, double epsilon, double b_bar) {
    ExperimentConfig e;
    e.grid = c.grid;
    e.solver = c.solver;
    e.b_bar = b_bar;
    e.u_bar = c.u_bar;
    e.datum = c.datum;
    e.epsilon = epsilon;
    e.tau0 = c.tau0;
    e.m_max = c.m_max;
    e.c_shear = c.c_shear;
    e.c0 = c.c0;
    e.c_bar = c.c_bar;
    e.norm_cap = c.norm_cap;
    e.modes = c.modes;
    e.seed = c.seed;
    e.trace_every = c.trace_every;
    e.checkpoint_every = c.checkpoint_every;
    e.out_dir = c.out;
    return e;
}

SweepConfig sweep_config(const RunConfig& c, unsigned jobs) {
    SweepConfig s;
    s.base = experiment_config(c, c.epsilon.front(), c.sweep_b_bar.front());
    s.epsilon = c.epsilon;
    s.b_bar = c.sweep_b_bar;
    s.jobs = jobs;
    s.c0_source = c.c0_source;
    s.calibration_time = c.calibration_time;
    return s;
}

}  // namespace mhdbl
