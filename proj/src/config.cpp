#include <vtl/config.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace vtl {

namespace {

std::string where(const std::string& origin, const YAML::Mark& m)
{
    if (m.is_null())
        return origin;
    return origin + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

// Field marks recorded while parsing, so that semantic errors found later can still point at a line.
class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& field, const YAML::Node& at, const std::string& msg) const
    {
        throw config_error(where(origin_, at.Mark()), field, msg);
    }

    void expect_map(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsMap())
            fail(field, n, "expected a mapping");
    }

    void reject_unknown(const YAML::Node& n, const std::string& prefix, std::initializer_list<std::string_view> allowed) const
    {
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            bool ok = false;
            for (auto a : allowed)
                ok = ok || a == key;
            if (!ok)
                fail(prefix + key, kv.first, "unknown key");
        }
    }

    std::int64_t integer(const YAML::Node& n, const std::string& field)
    {
        note(field, n);
        if (!n.IsScalar())
            fail(field, n, "expected an integer");
        try {
            return n.as<std::int64_t>();
        } catch (const YAML::Exception&) {
            fail(field, n, "expected an integer, got '" + n.Scalar() + "'");
        }
    }

    std::uint64_t count(const YAML::Node& n, const std::string& field)
    {
        const auto v = integer(n, field);
        if (v < 0)
            fail(field, n, "must be non-negative");
        return static_cast<std::uint64_t>(v);
    }

    double real(const YAML::Node& n, const std::string& field)
    {
        note(field, n);
        if (!n.IsScalar())
            fail(field, n, "expected a number");
        try {
            const auto v = n.as<double>();
            if (!std::isfinite(v))
                fail(field, n, "must be finite");
            return v;
        } catch (const YAML::Exception&) {
            fail(field, n, "expected a number, got '" + n.Scalar() + "'");
        }
    }

    std::string text(const YAML::Node& n, const std::string& field)
    {
        note(field, n);
        if (!n.IsScalar())
            fail(field, n, "expected a string");
        return n.Scalar();
    }

    void note(const std::string& field, const YAML::Node& n) { marks_.emplace(field, n.Mark()); }

    // Rethrows a validation failure with the location of the offending field, if known.
    [[noreturn]] void relocate(const config_error& e) const
    {
        auto it = marks_.find(e.field);
        if (it == marks_.end()) {
            // "topology.c" missing from the file: point at its parent.
            const auto dot = e.field.rfind('.');
            if (dot != std::string::npos)
                it = marks_.find(e.field.substr(0, dot));
        }
        const std::string msg = std::string(e.what()).substr(e.field.size() + 2);
        throw config_error(it == marks_.end() ? origin_ : where(origin_, it->second), e.field, msg);
    }

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, YAML::Mark> marks_;
};

YAML::Node load_yaml(const std::string& text, const std::string& origin)
{
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw config_error(where(origin, e.mark), "syntax", e.msg);
    }
}

void read_topology(Reader& r, const YAML::Node& n, TopologySpec& t)
{
    r.note("topology", n);
    r.expect_map(n, "topology");
    r.reject_unknown(n, "topology.", { "kind", "c", "p", "weightMean", "size" });
    if (!n["kind"])
        r.fail("topology.kind", n, "missing (ring, erdosRenyi or cliques)");
    const auto kind = r.text(n["kind"], "topology.kind");
    if (kind == "ring")
        t.kind = topology_kind::ring;
    else if (kind == "erdosRenyi")
        t.kind = topology_kind::erdos_renyi;
    else if (kind == "cliques")
        t.kind = topology_kind::cliques;
    else
        r.fail("topology.kind", n["kind"], "expected ring, erdosRenyi or cliques, got '" + kind + "'");

    auto only = [&](const char* key, topology_kind k) {
        if (n[key] && t.kind != k)
            r.fail(std::string("topology.") + key, n[key], "not used by topology kind '" + kind + "'");
    };
    only("c", topology_kind::ring);
    only("p", topology_kind::erdos_renyi);
    only("weightMean", topology_kind::erdos_renyi);
    only("size", topology_kind::cliques);

    if (t.kind == topology_kind::ring) {
        if (!n["c"])
            r.fail("topology.c", n, "missing");
        t.c = static_cast<std::uint32_t>(r.count(n["c"], "topology.c"));
    } else if (t.kind == topology_kind::erdos_renyi) {
        if (!n["p"])
            r.fail("topology.p", n, "missing");
        t.p = r.real(n["p"], "topology.p");
        if (n["weightMean"])
            t.weight_mean = r.real(n["weightMean"], "topology.weightMean");
    } else {
        if (!n["size"])
            r.fail("topology.size", n, "missing");
        t.clique_size = static_cast<std::uint32_t>(r.count(n["size"], "topology.size"));
    }
}

void read_byzantine(Reader& r, const YAML::Node& n, std::vector<ByzantineSpec>& out)
{
    r.note("byzantine", n);
    if (!n.IsSequence())
        r.fail("byzantine", n, "expected a list of {node, behavior}");
    for (const auto& item : n) {
        r.expect_map(item, "byzantine");
        r.reject_unknown(item, "byzantine.", { "node", "behavior", "liesAboutKnowledge" });
        if (!item["node"] || !item["behavior"])
            r.fail("byzantine", item, "each entry needs node and behavior");
        ByzantineSpec b;
        b.node = NodeId { static_cast<std::uint32_t>(r.count(item["node"], "byzantine.node")) };
        const auto name = r.text(item["behavior"], "byzantine.behavior");
        const auto kind = parse_behavior(name);
        if (!kind)
            r.fail("byzantine.behavior", item["behavior"], "unknown behavior '" + name + "'");
        b.profile.kind = *kind;
        if (item["liesAboutKnowledge"]) {
            try {
                b.profile.lies_about_knowledge = item["liesAboutKnowledge"].as<bool>();
            } catch (const YAML::Exception&) {
                r.fail("byzantine.liesAboutKnowledge", item["liesAboutKnowledge"], "expected true or false");
            }
        }
        out.push_back(b);
    }
}

ScenarioConfig read_scenario(Reader& r, const YAML::Node& n)
{
    ScenarioConfig cfg;
    r.expect_map(n, "config");
    r.reject_unknown(n, "", { "name", "N", "topology", "txRate", "amount", "initialValue", "rounds", "tailWindow", "seed", "mode", "selection", "byzantine", "confirmLatency", "retryCap", "scheme" });

    if (n["name"])
        cfg.name = r.text(n["name"], "name");
    if (cfg.name.empty() || cfg.name.find_first_of(",\"\n") != std::string::npos)
        r.fail("name", n["name"] ? n["name"] : n, "must be non-empty without commas, quotes or newlines");
    if (!n["N"])
        r.fail("N", n, "missing");
    cfg.n = static_cast<std::uint32_t>(r.count(n["N"], "N"));
    if (!n["topology"])
        r.fail("topology", n, "missing");
    read_topology(r, n["topology"], cfg.topology);
    if (n["txRate"])
        cfg.tx_rate = r.real(n["txRate"], "txRate");
    if (const auto a = n["amount"]) {
        r.note("amount", a);
        r.expect_map(a, "amount");
        r.reject_unknown(a, "amount.", { "lo", "hi" });
        if (!a["lo"] || !a["hi"])
            r.fail("amount", a, "needs lo and hi");
        cfg.amount_lo = r.count(a["lo"], "amount.lo");
        cfg.amount_hi = r.count(a["hi"], "amount.hi");
    }
    if (n["initialValue"])
        cfg.initial_value = r.count(n["initialValue"], "initialValue");
    if (n["rounds"])
        cfg.rounds = r.count(n["rounds"], "rounds");
    if (n["tailWindow"])
        cfg.tail_window = r.count(n["tailWindow"], "tailWindow");
    if (n["seed"])
        cfg.seed = r.count(n["seed"], "seed");
    if (n["mode"]) {
        const auto m = r.text(n["mode"], "mode");
        if (m == "interactive")
            cfg.mode = knowledge_mode::interactive;
        else if (m == "noninteractive")
            cfg.mode = knowledge_mode::noninteractive;
        else
            r.fail("mode", n["mode"], "expected interactive or noninteractive, got '" + m + "'");
    }
    if (n["selection"]) {
        const auto s = r.text(n["selection"], "selection");
        const auto p = parse_source_policy(s);
        if (!p)
            r.fail("selection", n["selection"], "expected frugal or naive, got '" + s + "'");
        cfg.selection = *p;
    }
    if (n["byzantine"])
        read_byzantine(r, n["byzantine"], cfg.byzantine);
    if (n["confirmLatency"])
        cfg.confirm_latency = r.count(n["confirmLatency"], "confirmLatency");
    if (n["retryCap"])
        cfg.retry_cap = static_cast<std::uint32_t>(r.count(n["retryCap"], "retryCap"));
    if (n["scheme"]) {
        const auto s = r.text(n["scheme"], "scheme");
        try {
            cfg.scheme = parse_sig_scheme(s);
        } catch (const error&) {
            r.fail("scheme", n["scheme"], "expected ed25519 or test, got '" + s + "'");
        }
    }
    try {
        cfg.validate();
    } catch (const config_error& e) {
        r.relocate(e);
    }
    return cfg;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw config_error(path, "file", "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_value(double v)
{
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

} // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin)
{
    Reader r(origin);
    return read_scenario(r, load_yaml(text, origin));
}

ScenarioConfig load_scenario(const std::string& path)
{
    return parse_scenario(read_file(path), path);
}

SweepSpec parse_sweep(const std::string& text, const std::string& origin)
{
    const auto root = load_yaml(text, origin);
    Reader r(origin);
    r.expect_map(root, "sweep");
    r.reject_unknown(root, "", { "base", "vary", "repetitions" });
    if (!root["base"])
        r.fail("base", root, "missing");
    SweepSpec spec;
    spec.base = read_scenario(r, root["base"]);
    if (root["repetitions"]) {
        spec.repetitions = static_cast<std::uint32_t>(r.count(root["repetitions"], "repetitions"));
        if (spec.repetitions < 1)
            r.fail("repetitions", root["repetitions"], "must be at least 1");
    }
    if (const auto v = root["vary"]) {
        if (v.IsNull())
            return spec;
        r.expect_map(v, "vary");
        r.reject_unknown(v, "vary.", { "N", "c", "p", "size" });
        for (const auto& kv : v) {
            const auto key = kv.first.as<std::string>();
            const std::string field = "vary." + key;
            if (!kv.second.IsSequence())
                r.fail(field, kv.second, "expected a list of values");
            auto& values = spec.vary[key];
            for (const auto& item : kv.second) {
                const double x = key == "p" ? r.real(item, field) : static_cast<double>(r.count(item, field));
                values.push_back(x);
            }
            if (values.empty())
                spec.vary.erase(key);
        }
        const auto kind = spec.base.topology.kind;
        auto needs = [&](const char* key, topology_kind k, const char* what) {
            if (spec.vary.count(key) && kind != k)
                r.fail(std::string("vary.") + key, v[key], std::string("only applies to ") + what + " topologies");
        };
        needs("c", topology_kind::ring, "ring");
        needs("p", topology_kind::erdos_renyi, "erdosRenyi");
        needs("size", topology_kind::cliques, "cliques");
    }
    return spec;
}

SweepSpec load_sweep(const std::string& path)
{
    return parse_sweep(read_file(path), path);
}

std::vector<SweepPoint> expand(const SweepSpec& spec)
{
    std::vector<std::pair<std::string, std::vector<double>>> axes(spec.vary.begin(), spec.vary.end());
    std::vector<std::size_t> at(axes.size(), 0);
    std::vector<SweepPoint> out;
    for (;;) {
        ScenarioConfig cfg = spec.base;
        SweepPoint point;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const auto& [key, values] = axes[k];
            const double x = values[at[k]];
            if (key == "N")
                cfg.n = static_cast<std::uint32_t>(x);
            else if (key == "c")
                cfg.topology.c = static_cast<std::uint32_t>(x);
            else if (key == "p")
                cfg.topology.p = x;
            else
                cfg.topology.clique_size = static_cast<std::uint32_t>(x);
            point.label += (point.label.empty() ? "" : "_") + key + format_value(x);
        }
        for (std::uint32_t i = 0; i < spec.repetitions; ++i) {
            ScenarioConfig run = cfg;
            run.seed = spec.base.seed + i;
            point.runs.push_back(std::move(run));
        }
        out.push_back(std::move(point));

        std::size_t k = axes.size();
        while (k > 0) {
            --k;
            if (++at[k] < axes[k].second.size())
                break;
            at[k] = 0;
            if (k == 0) {
                k = axes.size() + 1;
                break;
            }
        }
        if (axes.empty() || k == axes.size() + 1)
            break;
    }
    return out;
}

} // namespace vtl
