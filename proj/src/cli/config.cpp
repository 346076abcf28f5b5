#include "nhpc/cli/config.hpp"

#include <climits>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace nhpc::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, _] : j.items()) {
        if (!keys.count(k)) fail(join(path, k), "unknown key");
    }
}

const json& require(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(join(path, key), "required key is missing");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

long integer(const json& j, const std::string& path, long min_value) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(LONG_MAX)) {
        fail(path, "integer too large");
    }
    const long v = j.get<long>();
    if (v < min_value) fail(path, "must be >= " + std::to_string(min_value));
    return v;
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::string type_tag(const json& j, const std::string& path, const char* key) {
    const auto& t = require(j, path, key);
    if (!t.is_string()) fail(join(path, key), "expected a string");
    return t.get<std::string>();
}

MeanValueFunction parse_mvf(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string type = type_tag(j, path, "type");
    if (type == "linear") {
        check_object(j, path, {"type", "a"});
        return MeanValueFunction::linear(number(require(j, path, "a"), join(path, "a")));
    }
    if (type == "rational") {
        check_object(j, path, {"type", "a"});
        return MeanValueFunction::rational(number(require(j, path, "a"), join(path, "a")));
    }
    if (type == "power") {
        check_object(j, path, {"type", "a", "p"});
        return MeanValueFunction::power(number(require(j, path, "a"), join(path, "a")),
                                        number(require(j, path, "p"), join(path, "p")));
    }
    if (type == "capped_linear") {
        check_object(j, path, {"type", "a", "cap"});
        return MeanValueFunction::capped_linear(number(require(j, path, "a"), join(path, "a")),
                                                number(require(j, path, "cap"), join(path, "cap")));
    }
    if (type == "tabulated") {
        check_object(j, path, {"type", "x", "y"});
        return MeanValueFunction::tabulated(number_array(require(j, path, "x"), join(path, "x")),
                                            number_array(require(j, path, "y"), join(path, "y")));
    }
    fail(join(path, "type"), "unknown mean value function type \"" + type +
                                 "\" (linear, rational, power, capped_linear, tabulated)");
}

ClusterModel parse_cluster(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string family = type_tag(j, path, "family");
    if (family == "poisson") {
        check_object(j, path, {"family", "mu"});
        return ClusterModel::poisson(parse_mvf(require(j, path, "mu"), join(path, "mu")));
    }
    if (family == "negbinomial") {
        check_object(j, path, {"family", "mu", "p"});
        return ClusterModel::negbinomial(parse_mvf(require(j, path, "mu"), join(path, "mu")),
                                         number(require(j, path, "p"), join(path, "p")));
    }
    fail(join(path, "family"), "unknown cluster family \"" + family + "\" (poisson, negbinomial)");
}

DelayDistribution parse_delay(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string type = type_tag(j, path, "type");
    if (type == "none") {
        check_object(j, path, {"type"});
        return DelayDistribution::none();
    }
    if (type == "deterministic") {
        check_object(j, path, {"type", "d"});
        return DelayDistribution::deterministic(number(require(j, path, "d"), join(path, "d")));
    }
    if (type == "exponential") {
        check_object(j, path, {"type", "rate"});
        return DelayDistribution::exponential(number(require(j, path, "rate"), join(path, "rate")));
    }
    if (type == "uniform") {
        check_object(j, path, {"type", "lo", "hi"});
        return DelayDistribution::uniform(number(require(j, path, "lo"), join(path, "lo")),
                                          number(require(j, path, "hi"), join(path, "hi")));
    }
    fail(join(path, "type"), "unknown delay type \"" + type + "\" (none, deterministic, exponential, uniform)");
}

QuadratureConfig parse_quadrature(const json& j, const std::string& path) {
    check_object(j, path, {"rel_tol", "abs_tol", "max_depth"});
    QuadratureConfig q;
    if (j.contains("rel_tol")) q.rel_tol = number(j["rel_tol"], join(path, "rel_tol"));
    if (j.contains("abs_tol")) q.abs_tol = number(j["abs_tol"], join(path, "abs_tol"));
    if (j.contains("max_depth")) q.max_depth = static_cast<int>(integer(j["max_depth"], join(path, "max_depth"), 1));
    const auto v = q.violations(path);
    if (!v.empty()) throw ConfigError(v.front());
    return q;
}

McSettings parse_mc(const json& j, const std::string& path) {
    check_object(j, path, {"replicates", "seed"});
    McSettings mc;
    if (j.contains("replicates")) mc.replicates = integer(j["replicates"], join(path, "replicates"), 1);
    if (j.contains("seed")) {
        const auto& s = j["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            fail(join(path, "seed"), "expected an unsigned 64-bit integer");
        }
        mc.seed = s.get<std::uint64_t>();
    }
    return mc;
}

std::string locate(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // byte is 1-based and points just past the offending character.
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        std::string what = e.what();
        const auto pos = what.find("syntax error");
        throw ConfigError(locate(text, at) + ": " + (pos == std::string::npos ? what : what.substr(pos)));
    }
    check_object(root, "", {"model", "t", "s", "m", "m_range", "ell", "quadrature", "mc"});

    RunConfig cfg;
    const auto& model = require(root, "", "model");
    check_object(model, "model", {"center", "cluster", "delay"});
    cfg.scenario.center = parse_mvf(require(model, "model", "center"), "model.center");
    cfg.scenario.cluster = parse_cluster(require(model, "model", "cluster"), "model.cluster");
    if (model.contains("delay")) cfg.scenario.delay = parse_delay(model["delay"], "model.delay");
    cfg.scenario.t = number(require(root, "", "t"), "t");
    cfg.scenario.s = number(require(root, "", "s"), "s");

    std::vector<std::string> selectors;
    for (const char* k : {"m", "m_range", "ell"}) {
        if (root.contains(k)) selectors.emplace_back(k);
    }
    if (selectors.size() > 1) {
        fail(selectors[0] + "/" + selectors[1], "at most one of m, m_range, ell may be given");
    }
    if (root.contains("m")) {
        cfg.selector = Selector::m;
        cfg.lo = cfg.hi = integer(root["m"], "m", 0);
    } else if (root.contains("m_range")) {
        const auto& r = root["m_range"];
        if (!r.is_array() || r.size() != 2) fail("m_range", "expected [lo, hi]");
        cfg.selector = Selector::m_range;
        cfg.lo = integer(r[0], "m_range[0]", 0);
        cfg.hi = integer(r[1], "m_range[1]", 0);
        if (cfg.lo > cfg.hi) fail("m_range", "lo must not exceed hi");
    } else if (root.contains("ell")) {
        cfg.selector = Selector::ell;
        cfg.lo = cfg.hi = integer(root["ell"], "ell", 0);
    }
    const bool delayed = !cfg.scenario.delay.is_none();
    if (cfg.selector == Selector::ell && !delayed) fail("ell", "conditioning on the reported count needs model.delay");
    if ((cfg.selector == Selector::m || cfg.selector == Selector::m_range) && delayed) {
        fail(selectors[0], "conditioning on M(t) is only defined without a reporting delay; use ell");
    }
    if (root.contains("quadrature")) cfg.quadrature = parse_quadrature(root["quadrature"], "quadrature");
    if (root.contains("mc")) cfg.mc = parse_mc(root["mc"], "mc");

    const auto violations = scenario_violations(cfg.scenario);
    if (!violations.empty()) {
        std::string msg = violations.front();
        for (std::size_t i = 1; i < violations.size(); ++i) msg += "; " + violations[i];
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace nhpc::cli
