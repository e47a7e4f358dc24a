#pragma once

#include "../bifurcation.hpp"
#include "../minimizer_atlas.hpp"
#include "../solver.hpp"
#include "../symbolic/finiteness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nlad::cli {

using json = nlohmann::ordered_json;

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

namespace detail {

// Character iterator that records how far the JSON lexer has read.
struct TrackingIterator {
    using iterator_category = std::forward_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    const char* base = nullptr;
    const char* p = nullptr;
    std::size_t* furthest = nullptr;

    reference operator*() const
    {
        const auto read = static_cast<std::size_t>(p - base) + 1;
        if (read > *furthest) *furthest = read;
        return *p;
    }
    TrackingIterator& operator++()
    {
        ++p;
        return *this;
    }
    TrackingIterator operator++(int)
    {
        auto t = *this;
        ++p;
        return t;
    }
    bool operator==(const TrackingIterator& o) const { return p == o.p; }
    bool operator!=(const TrackingIterator& o) const { return p != o.p; }
};

inline std::string escape_token(const std::string& k)
{
    std::string out;
    for (char c : k) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

// Builds the DOM and a map from JSON pointer to source line.
class LineSax {
public:
    LineSax(json& root, const std::vector<std::size_t>& newlines, std::size_t& furthest,
            std::map<std::string, int>& lines)
        : dom_(root, true), newlines_(newlines), furthest_(furthest), lines_(lines)
    {
    }

    bool null() { return scalar() && dom_.null(); }
    bool boolean(bool v) { return scalar() && dom_.boolean(v); }
    bool number_integer(json::number_integer_t v) { return scalar() && dom_.number_integer(v); }
    bool number_unsigned(json::number_unsigned_t v) { return scalar() && dom_.number_unsigned(v); }
    bool number_float(json::number_float_t v, const json::string_t& s) { return scalar() && dom_.number_float(v, s); }
    bool string(json::string_t& v) { return scalar() && dom_.string(v); }
    bool binary(json::binary_t& v) { return scalar() && dom_.binary(v); }

    bool start_object(std::size_t n)
    {
        open(false);
        return dom_.start_object(n);
    }
    bool end_object()
    {
        frames_.pop_back();
        return dom_.end_object();
    }
    bool start_array(std::size_t n)
    {
        open(true);
        return dom_.start_array(n);
    }
    bool end_array()
    {
        frames_.pop_back();
        return dom_.end_array();
    }
    bool key(json::string_t& k)
    {
        key_ = k;
        lines_[frames_.back().path + "/" + escape_token(k)] = line_at(furthest_ - 1);
        return dom_.key(k);
    }

    template <class Exception>
    bool parse_error(std::size_t pos, const std::string& tok, const Exception& ex)
    {
        return dom_.parse_error(pos, tok, ex);
    }

private:
    struct Frame {
        bool array = false;
        std::size_t index = 0;
        std::string path;
    };

    int line_at(std::size_t offset) const
    {
        return static_cast<int>(std::lower_bound(newlines_.begin(), newlines_.end(), offset) - newlines_.begin()) + 1;
    }

    // Path of the value about to be delivered; array elements get their own line entry.
    std::string next_path(std::size_t offset)
    {
        if (frames_.empty()) {
            lines_[""] = line_at(offset);
            return "";
        }
        Frame& f = frames_.back();
        if (!f.array) return f.path + "/" + escape_token(key_);
        const std::string path = f.path + "/" + std::to_string(f.index++);
        lines_[path] = line_at(offset);
        return path;
    }

    bool scalar()
    {
        // Numbers are reported after one character of lookahead.
        next_path(furthest_ >= 2 ? furthest_ - 2 : 0);
        return true;
    }

    void open(bool array) { frames_.push_back({array, 0, next_path(furthest_ ? furthest_ - 1 : 0)}); }

    nlohmann::detail::json_sax_dom_parser<json> dom_;
    const std::vector<std::size_t>& newlines_;
    std::size_t& furthest_;
    std::map<std::string, int>& lines_;
    std::vector<Frame> frames_;
    std::string key_;
};

} // namespace detail

struct Document {
    json root;
    std::map<std::string, int> lines;
    std::string source = "config";
    std::filesystem::path base_dir;

    static Document parse(const std::string& text, const std::string& source = "config")
    {
        Document d;
        d.source = source;
        std::vector<std::size_t> newlines;
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n') newlines.push_back(i);
        std::size_t furthest = 0;
        detail::LineSax sax(d.root, newlines, furthest, d.lines);
        detail::TrackingIterator first{text.data(), text.data(), &furthest};
        detail::TrackingIterator last{text.data(), text.data() + text.size(), &furthest};
        try {
            json::sax_parse(first, last, &sax);
        } catch (const json::parse_error& e) {
            std::string msg = e.what();
            const auto at = msg.find("parse error");
            if (at != std::string::npos) msg = msg.substr(at);
            throw ConfigError(source + ": invalid JSON: " + msg);
        }
        if (!d.root.is_object()) throw ConfigError(source + " line 1: the config must be a JSON object");
        return d;
    }

    static Document load(const std::string& path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot read config '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        Document d = parse(ss.str(), path);
        d.base_dir = std::filesystem::path(path).parent_path();
        return d;
    }

    int line_of(std::string path) const
    {
        for (;;) {
            auto it = lines.find(path);
            if (it != lines.end()) return it->second;
            if (path.empty()) return 1;
            path.erase(path.rfind('/'));
        }
    }
};

// A value inside the document with its pointer path, for line-precise errors.
class Node {
public:
    Node(const Document& d, const json& j, std::string path) : doc_(&d), j_(&j), path_(std::move(path)) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }
    int line() const { return doc_->line_of(path_); }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError(doc_->source + " line " + std::to_string(line()) + " (" +
                          (path_.empty() ? "/" : path_) + "): " + msg);
    }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    Node at(const std::string& key) const
    {
        if (!has(key)) fail("missing required key '" + key + "'");
        return child(key);
    }

    std::optional<Node> find(const std::string& key) const
    {
        if (!has(key)) return std::nullopt;
        return child(key);
    }

    void only(std::initializer_list<const char*> keys) const
    {
        if (!j_->is_object()) fail("expected an object");
        for (auto it = j_->begin(); it != j_->end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known) child(it.key()).fail("unknown key '" + it.key() + "'");
        }
    }

    std::vector<Node> items() const
    {
        if (!j_->is_array()) fail("expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_->size(); ++i) out.emplace_back(*doc_, (*j_)[i], path_ + "/" + std::to_string(i));
        return out;
    }

    // Plain numbers or exact strings such as "21/20".
    double number() const
    {
        if (j_->is_number()) return j_->get<double>();
        if (j_->is_string()) return rational().get_d();
        fail("expected a number");
    }

    mpq_class rational() const
    {
        try {
            if (j_->is_string()) return sym::parse_rational(j_->get<std::string>());
            if (j_->is_number_integer()) return mpq_class(std::to_string(j_->get<std::int64_t>()));
            if (j_->is_number()) return sym::to_rational(j_->get<double>());
        } catch (const ValidationError& e) {
            fail(e.what());
        }
        fail("expected a number or a \"p/q\" string");
    }

    std::int64_t integer() const
    {
        if (j_->is_number_integer()) return j_->get<std::int64_t>();
        if (j_->is_number_float()) {
            const double v = j_->get<double>();
            if (v == std::floor(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
        }
        fail("expected an integer");
    }

    std::size_t count(std::size_t min_value = 0) const
    {
        const auto v = integer();
        if (v < 0 || static_cast<std::size_t>(v) < min_value)
            fail("expected an integer >= " + std::to_string(min_value));
        return static_cast<std::size_t>(v);
    }

    std::uint64_t seed() const
    {
        if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
        const auto v = integer();
        if (v < 0) fail("seed must be non-negative");
        return static_cast<std::uint64_t>(v);
    }

    bool boolean() const
    {
        if (!j_->is_boolean()) fail("expected true or false");
        return j_->get<bool>();
    }

    std::string string() const
    {
        if (!j_->is_string()) fail("expected a string");
        return j_->get<std::string>();
    }

    std::vector<double> numbers() const
    {
        std::vector<double> out;
        for (const auto& n : items()) out.push_back(n.number());
        return out;
    }

private:
    Node child(const std::string& key) const { return Node(*doc_, (*j_)[key], path_ + "/" + detail::escape_token(key)); }

    const Document* doc_;
    const json* j_;
    std::string path_;
};

struct ModelSection {
    ModelParams numeric;
    std::optional<sym::RationalParams> exact;
    std::string exact_error;     // why exact parameters are unavailable
    int line = 1;
};

struct InitialCondition {
    std::string kind = "homogeneous";
    double amplitude = 0.0;
    std::uint64_t seed = 1;
    std::optional<SteadyClass> cls;
    std::optional<double> spike_width;
    std::size_t mode = 1;
    std::vector<double> weights;
    std::filesystem::path path;
    int line = 1;
};

struct SweepSection {
    double start = 0.0, stop = 0.0, step = 0.05;
    double perturbation = 1e-2;
    std::uint64_t seed = 1;
    bool symmetric = true;
    bool stop_on_collapse = true;
    double collapse_tol = 1e-3;
    bool restart_on_error = false;
    int line = 1;
};

struct SymbolicSection {
    std::vector<sym::LexOrder> orders;       // empty means natural order
    bool all_orders = false;
    std::optional<std::vector<sym::ChainStep>> chain;
    sym::GroebnerCaps caps;
    int line = 1;
};

struct RunConfig {
    std::optional<ModelSection> model;
    std::optional<std::size_t> grid_m;
    int grid_line = 1;
    SolverConfig solver;
    InitialCondition ic;
    std::optional<SweepSection> sweep;
    SymbolicSection symbolic;
    std::optional<RegimeMapSpec> regime_map;
    std::size_t q_max = 0;
    std::string output_dir = "out";
    std::string digest;
    std::string source = "config";

    [[noreturn]] void missing(const std::string& section) const
    {
        throw ConfigError(source + ": this command needs a '" + section + "' section");
    }
    const ModelSection& need_model() const
    {
        if (!model) missing("model");
        return *model;
    }
    Grid need_grid() const
    {
        const auto& m = need_model();
        if (!grid_m) missing("grid");
        try {
            Grid g(*grid_m, m.numeric.length);
            check_grid(m.numeric, g);
            return g;
        } catch (const ValidationError& e) {
            throw ConfigError(source + " line " + std::to_string(grid_line) + " (/grid): " + e.what());
        }
    }
    const sym::RationalParams& need_exact() const
    {
        const auto& m = need_model();
        if (!m.exact)
            throw ConfigError(source + " line " + std::to_string(m.line) + " (/model): " + m.exact_error);
        return *m.exact;
    }
};

namespace detail {

inline ModelSection read_model(const Node& m)
{
    m.only({"N", "D", "gamma", "p", "L", "kernel"});
    ModelSection s;
    s.line = m.line();
    ModelParams& p = s.numeric;
    const Node d = m.at("D"), g = m.at("gamma");
    const auto ds = d.items();
    if (ds.empty()) d.fail("D must not be empty");
    p.n = ds.size();
    if (auto n = m.find("N")) {
        if (n->count(1) != p.n) n->fail("N does not match the length of D");
    }
    const auto rows = g.items();
    if (rows.size() != p.n) g.fail("gamma must have N = " + std::to_string(p.n) + " rows");
    for (const auto& r : rows) {
        const auto cells = r.items();
        if (cells.size() != p.n) r.fail("gamma must be N x N; this row has " + std::to_string(cells.size()) + " entries");
        p.gamma.emplace_back();
        for (const auto& c : cells) p.gamma.back().push_back(c.number());
    }
    for (const auto& v : ds) {
        p.diffusion.push_back(v.number());
        if (!(p.diffusion.back() > 0.0)) v.fail("diffusion coefficients must be positive");
    }
    if (auto pn = m.find("p")) {
        const auto ps = pn->items();
        if (ps.size() != p.n) pn->fail("p must have N entries");
        for (const auto& v : ps) {
            p.mass.push_back(v.number());
            if (!(p.mass.back() > 0.0)) v.fail("species masses must be positive");
        }
    } else {
        p.mass.assign(p.n, 1.0);
    }
    if (auto l = m.find("L")) p.length = l->number();
    if (auto k = m.find("kernel")) {
        k->only({"kind", "alpha"});
        const Node kind = k->at("kind");
        const std::string name = kind.string();
        if (name == "top-hat") {
            p.kernel = KernelSpec::top_hat(k->at("alpha").number());
        } else if (name == "delta") {
            if (k->has("alpha")) k->at("alpha").fail("the delta kernel takes no alpha");
            p.kernel = KernelSpec::delta();
        } else {
            kind.fail("kernel kind must be \"top-hat\" or \"delta\"");
        }
    }
    try {
        p.validate();
    } catch (const ValidationError& e) {
        m.fail(e.what());
    }

    try {
        sym::RationalParams r;
        r.n = p.n;
        for (const auto& v : ds) r.diffusion.push_back(v.rational());
        for (const auto& row : rows) {
            r.gamma.emplace_back();
            for (const auto& c : row.items()) r.gamma.back().push_back(c.rational());
        }
        r.validate();
        s.exact = std::move(r);
    } catch (const ValidationError& e) {
        s.exact_error = e.what();
    }
    return s;
}

inline SolverConfig read_solver(const Node& n)
{
    n.only({"dt", "cfl", "t_max", "steady_tol", "scheme", "steady_checks"});
    SolverConfig c;
    if (auto v = n.find("dt")) c.dt = v->number();
    if (auto v = n.find("cfl")) c.cfl = v->number();
    if (auto v = n.find("t_max")) c.t_max = v->number();
    if (auto v = n.find("steady_tol")) c.steady_tol = v->number();
    if (auto v = n.find("steady_checks")) c.steady_checks = v->count(1);
    if (auto v = n.find("scheme")) {
        try {
            c.scheme = scheme_from_name(v->string());
        } catch (const ValidationError& e) {
            v->fail(e.what());
        }
    }
    return c;
}

inline InitialCondition read_ic(const Node& n)
{
    n.only({"kind", "amplitude", "seed", "template", "spike_width", "mode", "weights", "path"});
    InitialCondition ic;
    ic.line = n.line();
    if (auto v = n.find("kind")) ic.kind = v->string();
    if (ic.kind == "perturbed") ic.amplitude = 1e-2;
    if (auto v = n.find("amplitude")) ic.amplitude = v->number();
    if (auto v = n.find("seed")) ic.seed = v->seed();
    if (ic.kind == "homogeneous" || ic.kind == "perturbed") {
        for (const char* k : {"template", "spike_width", "mode", "weights", "path"})
            if (n.has(k)) n.at(k).fail(std::string("'") + k + "' does not apply to ic kind '" + ic.kind + "'");
    } else if (ic.kind == "template") {
        const Node t = n.at("template");
        try {
            ic.cls = class_from_name(t.string());
        } catch (const ValidationError& e) {
            t.fail(e.what());
        }
        if (auto v = n.find("spike_width")) ic.spike_width = v->number();
    } else if (ic.kind == "mode") {
        ic.mode = n.at("mode").count(1);
        ic.weights = n.at("weights").numbers();
    } else if (ic.kind == "file") {
        ic.path = n.at("path").string();
    } else {
        n.at("kind").fail("ic kind must be homogeneous, perturbed, template, mode or file");
    }
    if (!(ic.amplitude >= 0.0) && ic.kind != "mode") n.at("amplitude").fail("amplitude must be non-negative");
    return ic;
}

inline SweepSection read_sweep(const Node& n)
{
    n.only({"param", "start", "stop", "step", "perturbation", "seed", "symmetric", "stop_on_collapse", "collapse_tol",
            "restart_on_error"});
    SweepSection s;
    s.line = n.line();
    if (auto v = n.find("param"))
        if (v->string() != "gamma12") v->fail("only \"gamma12\" can be swept");
    s.start = n.at("start").number();
    s.stop = n.at("stop").number();
    s.step = n.at("step").number();
    if (auto v = n.find("perturbation")) s.perturbation = v->number();
    if (auto v = n.find("seed")) s.seed = v->seed();
    if (auto v = n.find("symmetric")) s.symmetric = v->boolean();
    if (auto v = n.find("stop_on_collapse")) s.stop_on_collapse = v->boolean();
    if (auto v = n.find("collapse_tol")) s.collapse_tol = v->number();
    if (auto v = n.find("restart_on_error")) s.restart_on_error = v->boolean();
    return s;
}

inline sym::LexOrder read_order(const Node& n, std::size_t nvars)
{
    sym::LexOrder o;
    for (const auto& v : n.items()) {
        std::size_t idx = 0;
        if (v.raw().is_string()) {
            const std::string s = v.string();
            if (s.size() < 2 || s[0] != 'u') v.fail("variables are named u1, u2, ...");
            idx = static_cast<std::size_t>(std::stoul(s.substr(1)));
        } else {
            idx = v.count(1);
        }
        if (idx < 1 || (nvars && idx > nvars)) v.fail("variable index out of range");
        o.rank.push_back(idx - 1);
    }
    if (nvars) {
        try {
            o.validate(nvars);
        } catch (const ValidationError& e) {
            n.fail(e.what());
        }
    }
    return o;
}

inline SymbolicSection read_symbolic(const Node& n, std::size_t nvars)
{
    n.only({"var_order", "chain", "max_pairs", "max_coefficient_bits"});
    SymbolicSection s;
    s.line = n.line();
    if (auto v = n.find("var_order")) {
        if (v->raw().is_string()) {
            if (v->string() != "all") v->fail("var_order must be a list of variables or \"all\"");
            s.all_orders = true;
        } else if (!v->raw().empty() && v->raw()[0].is_array()) {
            for (const auto& o : v->items()) s.orders.push_back(read_order(o, nvars));
        } else {
            s.orders.push_back(read_order(*v, nvars));
        }
    }
    if (auto c = n.find("chain")) {
        std::vector<sym::ChainStep> chain;
        for (const auto& link : c->items()) {
            link.only({"from", "rows"});
            sym::ChainStep st;
            st.from = link.has("from") ? link.at("from").count() : chain.size();
            for (const auto& r : link.at("rows").items()) st.rows.push_back(r.count(1) - 1);
            chain.push_back(std::move(st));
        }
        s.chain = std::move(chain);
    }
    if (auto v = n.find("max_pairs")) s.caps.max_pairs = v->count(1);
    if (auto v = n.find("max_coefficient_bits")) s.caps.max_coefficient_bits = v->count(1);
    return s;
}

inline RegimeMapSpec read_regime_map(const Node& n)
{
    n.only({"g12_min", "g12_max", "g11_min", "g11_max", "n12", "n11"});
    RegimeMapSpec s;
    if (auto v = n.find("g12_min")) s.g12_min = v->number();
    if (auto v = n.find("g12_max")) s.g12_max = v->number();
    if (auto v = n.find("g11_min")) s.g11_min = v->number();
    if (auto v = n.find("g11_max")) s.g11_max = v->number();
    if (auto v = n.find("n12")) s.n12 = v->count(2);
    if (auto v = n.find("n11")) s.n11 = v->count(2);
    if (!(s.g12_min < s.g12_max) || !(s.g11_min < s.g11_max)) n.fail("ranges must have min < max");
    return s;
}

} // namespace detail

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

// Digest of the config with overrides applied; the output directory does not take part.
inline std::string config_digest(const json& root)
{
    json c = root;
    if (c.contains("output") && c["output"].is_object()) c["output"].erase("directory");
    return hex64(fnv1a64(c.dump()));
}

inline RunConfig read_config(Document doc, const Overrides& ov = {})
{
    if (ov.seed) {
        if (doc.root.contains("ic") && doc.root["ic"].is_object()) doc.root["ic"]["seed"] = *ov.seed;
        if (doc.root.contains("sweep") && doc.root["sweep"].is_object()) doc.root["sweep"]["seed"] = *ov.seed;
    }
    const Node root(doc, doc.root, "");
    root.only({"model", "grid", "solver", "ic", "sweep", "symbolic", "regime_map", "dispersion", "output"});
    RunConfig c;
    c.source = doc.source;
    if (auto m = root.find("model")) c.model = detail::read_model(*m);
    if (auto g = root.find("grid")) {
        g->only({"M"});
        c.grid_line = g->line();
        c.grid_m = g->at("M").count(2);
    }
    if (auto s = root.find("solver")) {
        c.solver = detail::read_solver(*s);
        try {
            c.solver.validate();
        } catch (const ValidationError& e) {
            s->fail(e.what());
        }
    }
    if (auto o = root.find("output")) {
        o->only({"directory", "record_every"});
        if (auto v = o->find("directory")) c.output_dir = v->string();
        if (auto v = o->find("record_every")) c.solver.record_every = v->count(1);
    }
    if (auto v = root.find("ic")) c.ic = detail::read_ic(*v);
    if (!c.ic.path.empty() && c.ic.path.is_relative()) c.ic.path = doc.base_dir / c.ic.path;
    if (auto v = root.find("sweep")) c.sweep = detail::read_sweep(*v);
    if (auto v = root.find("symbolic")) c.symbolic = detail::read_symbolic(*v, c.model ? c.model->numeric.n : 0);
    if (auto v = root.find("regime_map")) c.regime_map = detail::read_regime_map(*v);
    if (auto v = root.find("dispersion")) {
        v->only({"q_max"});
        if (auto q = v->find("q_max")) c.q_max = q->count(1);
    }
    if (ov.out_dir) c.output_dir = *ov.out_dir;
    c.digest = config_digest(doc.root);
    return c;
}

inline State initial_state(const RunConfig& c, const ModelParams& p, const Grid& g)
{
    const auto& ic = c.ic;
    auto fail = [&](const std::string& msg) -> ConfigError {
        return ConfigError(c.source + " line " + std::to_string(ic.line) + " (/ic): " + msg);
    };
    try {
        if (ic.kind == "mode") return mode_state(p, g, ic.mode, ic.amplitude, ic.weights);
        State base = homogeneous_state(p, g);
        if (ic.kind == "template") {
            base = template_state(p, g, *ic.cls, ic.spike_width);
        } else if (ic.kind == "file") {
            std::ifstream f(ic.path);
            if (!f) throw fail("cannot read state file '" + ic.path.string() + "'");
            base = read_state_csv(f, p.length);
            if (base.species() != p.n || base.grid().size() != g.size())
                throw fail("state file does not match N and M of the config");
        }
        return perturbed_state(base, ic.amplitude, ic.seed);
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw fail(e.what());
    }
}

} // namespace nlad::cli
