#include "defilab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "defilab/complexity.hpp"
#include "defilab/error.hpp"
#include "defilab/formula.hpp"
#include "defilab/periodicity.hpp"
#include "defilab/point_set.hpp"
#include "defilab/qfnf.hpp"
#include "defilab/raster.hpp"

namespace defilab {

namespace {

using nlohmann::ordered_json;

/// Bad flag combinations detected after parsing; reported like CLI11 parse errors.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string subcommand;
    std::optional<std::string> formula;
    std::optional<std::string> formula_file;
    std::optional<std::string> example_name;
    std::optional<std::string> grid_json;
    std::optional<std::string> vars;
    std::optional<std::string> window;
    std::optional<std::string> n_range;
    std::string format = "auto";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::optional<std::size_t> budget_cells;
    std::optional<std::uint64_t> budget_bits;
    bool stabilize = false;
    bool fit = false;
    std::optional<std::string> point;
    std::optional<std::string> vector;
    std::optional<std::string> sizes;
    std::optional<std::string> periods;
    std::optional<std::string> cert;
    std::optional<std::string> cert_file;
    std::optional<std::string> word;
    std::optional<std::size_t> axis;
    std::optional<std::int64_t> value;
    std::optional<std::int64_t> K;
    std::optional<std::int64_t> escape;
    std::optional<std::int64_t> max_norm;
    std::optional<std::int64_t> t;
    std::int64_t n_max = 10;
    std::optional<std::size_t> depth;
    std::size_t max_sections = 48;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        std::string piece(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        piece.erase(0, piece.find_first_not_of(" \t"));
        piece.erase(piece.find_last_not_of(" \t") + 1);
        if (!piece.empty()) out.push_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text) {
    auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            std::int64_t v = std::stoll(text);
            return {v, v};
        }
        std::int64_t lo = std::stoll(text.substr(0, dots));
        std::int64_t hi = std::stoll(text.substr(dots + 2));
        if (lo > hi) throw UsageError("empty range " + text);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw UsageError("malformed range '" + text + "', expected A..B");
    }
}

class Command {
public:
    Command(const Flags& flags, std::ostream& out) : f_(flags), out_(out) {
        limits_.max_cells = f_.budget_cells.value_or(limits_.max_cells);
        limits_.max_coefficient_bits = f_.budget_bits.value_or(limits_.max_coefficient_bits);
        count_.threads = f_.threads;
    }

    void run() {
        static const std::map<std::string, void (Command::*)()> table{
            {"parse", &Command::parse_cmd},
            {"qe", &Command::qe_cmd},
            {"eval", &Command::eval_cmd},
            {"raster", &Command::raster_cmd},
            {"complexity", &Command::complexity_cmd},
            {"recurrent", &Command::recurrent_cmd},
            {"rect", &Command::rect_cmd},
            {"section", &Command::section_cmd},
            {"border", &Command::border_cmd},
            {"local-periods", &Command::local_periods_cmd},
            {"verify-cert", &Command::verify_cert_cmd},
            {"muchnik", &Command::muchnik_cmd},
            {"mh-check", &Command::mh_check_cmd},
            {"global-periods", &Command::global_periods_cmd},
            {"repetitive", &Command::repetitive_cmd},
            {"classify", &Command::classify_cmd},
            {"example", &Command::example_cmd},
        };
        (this->*table.at(f_.subcommand))();
    }

private:
    // ---- sources -------------------------------------------------------

    std::size_t source_count() const {
        return (f_.formula ? 1 : 0) + (f_.formula_file ? 1 : 0) + (f_.example_name ? 1 : 0) + (f_.grid_json ? 1 : 0);
    }

    bool has_formula() const { return f_.formula || f_.formula_file; }

    Formula formula() const {
        if (f_.formula) return parse(*f_.formula);
        return parse_file_contents(read_file(*f_.formula_file));
    }

    std::vector<std::string> variables_of(const Formula& phi) const {
        if (f_.vars) return split(*f_.vars, ',');
        auto vars = free_vars(phi);
        std::sort(vars.begin(), vars.end());
        return vars;
    }

    const PointSet& set() {
        if (set_) return *set_;
        if (source_count() != 1)
            throw UsageError("exactly one of --formula, --formula-file, --example, --grid-json is required");
        if (has_formula()) {
            Formula phi = formula();
            set_ = PointSet::symbolic(eliminate(phi, variables_of(phi), limits_), "formula");
        } else if (f_.example_name) {
            set_ = example(*f_.example_name);
        } else {
            set_ = PointSet::from_grid(grid_from_json(read_file(*f_.grid_json)), false, *f_.grid_json);
        }
        return *set_;
    }

    const Qfnf& symbolic() {
        const PointSet& s = set();
        if (!s.is_symbolic()) throw Error("'" + s.name() + "' is not a symbolic set");
        return s.qfnf();
    }

    // ---- common parameters --------------------------------------------

    std::optional<Window> optional_window() {
        if (f_.window) return parse_window(*f_.window, set().variables());
        if (set().backing() == PointSet::Backing::grid) return set().grid().window();
        return std::nullopt;
    }

    Window window() {
        auto w = optional_window();
        if (!w) throw UsageError(f_.subcommand + " requires --window");
        if (w->dimension() != set().dimension())
            throw DimensionError("window has dimension " + std::to_string(w->dimension()) + ", set has " +
                                 std::to_string(set().dimension()));
        return *w;
    }

    std::pair<std::int64_t, std::int64_t> n_range(std::int64_t lo, std::int64_t hi) const {
        if (!f_.n_range) return {lo, hi};
        auto r = parse_range(*f_.n_range);
        if (r.first < 1) throw UsageError("--n must start at 1 or later");
        return r;
    }

    Point point_flag(const std::optional<std::string>& text, const char* flag) const {
        if (!text) throw UsageError(f_.subcommand + " requires " + flag);
        return parse_point(*text);
    }

    template <typename T>
    T required(const std::optional<T>& v, const char* flag) const {
        if (!v) throw UsageError(f_.subcommand + " requires " + flag);
        return *v;
    }

    std::string format(std::initializer_list<const char*> allowed, const char* fallback) const {
        std::string fmt = f_.format == "auto" ? fallback : f_.format;
        for (const char* a : allowed)
            if (fmt == a) return fmt;
        throw UsageError("--format " + fmt + " is not available for " + f_.subcommand);
    }

    RasterOptions raster_options() const {
        RasterOptions o;
        o.threads = f_.threads;
        return o;
    }

    // ---- output helpers -------------------------------------------------

    static ordered_json rows_json(const ComplexityTable& t) {
        ordered_json rows = ordered_json::array();
        for (const auto& r : t)
            rows.push_back(ordered_json{{"n", r.n},
                                        {"count", r.count},
                                        {"stabilized", r.stabilized},
                                        {"window", r.window.to_string()},
                                        {"L", r.escape}});
        return rows;
    }

    void print_table(const ComplexityTable& t) {
        std::string fmt = format({"csv", "text", "json"}, "csv");
        std::optional<GrowthFit> fit;
        if (f_.fit) fit = growth_fit(t);
        if (fmt == "json") {
            ordered_json j;
            j["rows"] = rows_json(t);
            if (fit) j["fit"] = ordered_json::parse(to_json(*fit));
            out_ << j.dump(2) << "\n";
            return;
        }
        out_ << (fmt == "csv" ? to_csv(t) : to_text(t));
        if (fit) out_ << to_json(*fit) << "\n";
    }

    void print_qfnf(const Qfnf& q) {
        format({"text"}, "text");
        out_ << to_text(q);
    }

    // ---- subcommands ----------------------------------------------------

    void parse_cmd() {
        if (!has_formula() || source_count() != 1) throw UsageError("parse requires --formula or --formula-file");
        out_ << render(formula()) << "\n";
    }

    void qe_cmd() { print_qfnf(symbolic()); }

    void eval_cmd() {
        Point p = point_flag(f_.point, "--point");
        if (p.size() != set().dimension())
            throw DimensionError("point has dimension " + std::to_string(p.size()) + ", set has " +
                                 std::to_string(set().dimension()));
        out_ << (set().contains(p) ? "true" : "false") << "\n";
    }

    void raster_cmd() {
        std::string fmt = format({"ascii", "pbm", "json", "text"}, "ascii");
        Grid g = rasterize(set(), window(), raster_options());
        if (fmt == "pbm") out_ << to_pbm(g);
        else if (fmt == "json") out_ << to_json(g) << "\n";
        else out_ << to_ascii(g);
    }

    StabilizeOptions stabilize_options() {
        StabilizeOptions o;
        o.clamp = f_.window ? std::optional<Window>(window()) : std::nullopt;
        o.count = count_;
        return o;
    }

    void complexity_cmd() {
        auto [lo, hi] = n_range(1, 8);
        if (f_.stabilize) {
            print_table(block_table(set(), lo, hi, stabilize_options()));
            return;
        }
        Window w = window();
        Grid g = rasterize(set(), w, raster_options());
        ComplexityTable t;
        for (std::int64_t n = lo; n <= hi; ++n) t.push_back({n, p_count(g, n, count_), false, w, 0});
        print_table(t);
    }

    void recurrent_cmd() {
        auto [lo, hi] = n_range(1, 8);
        if (f_.stabilize) {
            print_table(recurrent_table(set(), lo, hi, stabilize_options()));
            return;
        }
        Window w = window();
        std::int64_t escape = f_.escape.value_or(w.max_norm() / 2);
        Grid g = rasterize(set(), w, raster_options());
        ComplexityTable t;
        for (std::int64_t n = lo; n <= hi; ++n) t.push_back({n, r_count(g, n, escape, count_), false, w, escape});
        print_table(t);
    }

    void rect_cmd() {
        format({"text"}, "text");
        Point sizes = point_flag(f_.sizes, "--sizes");
        out_ << rect_count(set(), sizes, window(), count_) << "\n";
    }

    void section_cmd() {
        std::size_t axis = required(f_.axis, "--axis");
        if (axis < 1 || axis > symbolic().dimension())
            throw UsageError("--axis must be between 1 and " + std::to_string(symbolic().dimension()));
        print_qfnf(section(symbolic(), axis - 1, required(f_.value, "--value")));
    }

    void border_cmd() { print_qfnf(border(symbolic(), point_flag(f_.vector, "--vector"), limits_)); }

    void local_periods_cmd() {
        std::string fmt = format({"text", "json"}, "text");
        Point x = point_flag(f_.point, "--point");
        std::int64_t K = required(f_.K, "--K");
        auto v = minimal_local_period(set(), x, K, f_.max_norm);
        if (fmt == "json") {
            ordered_json j;
            j["point"] = x;
            j["K"] = K;
            j["period"] = v ? ordered_json(*v) : ordered_json(nullptr);
            out_ << j.dump() << "\n";
        } else {
            out_ << (v ? format_point(*v) : std::string("none")) << "\n";
        }
    }

    void verify_cert_cmd() {
        format({"json"}, "json");
        std::string text;
        if (f_.cert) text = *f_.cert;
        else if (f_.cert_file) text = read_file(*f_.cert_file);
        else throw UsageError("verify-cert requires --cert or --cert-file");
        auto report = verify_local_periodicity(set(), cert_from_json(text), window());
        ordered_json j;
        j["holds"] = report.holds;
        j["violation"] = report.violation ? ordered_json(*report.violation) : ordered_json(nullptr);
        j["checked"] = report.checked;
        out_ << j.dump() << "\n";
    }

    std::vector<Point> periods() const {
        if (!f_.periods) throw UsageError(f_.subcommand + " requires --periods");
        std::vector<Point> V;
        for (const auto& piece : split(*f_.periods, ';')) V.push_back(parse_point(piece));
        return V;
    }

    void muchnik_cmd() {
        format({"json"}, "json");
        std::int64_t K = required(f_.K, "--K");
        auto L = muchnik_sample(set(), K, periods(), window());
        ordered_json j;
        j["K"] = K;
        j["L"] = L ? ordered_json(*L) : ordered_json(nullptr);
        out_ << j.dump() << "\n";
    }

    std::pair<std::vector<bool>, std::int64_t> word() {
        if (f_.word) {
            if (source_count() != 0) throw UsageError("--word cannot be combined with another source");
            return {word_from_string(*f_.word), 0};
        }
        Window w = window();
        std::optional<std::size_t> line_axis;
        for (std::size_t i = 0; i < w.dimension(); ++i) {
            if (w.axis(i).extent() == 1) continue;
            if (line_axis) throw UsageError("mh-check reads a line: all but one window axis must be a single value");
            line_axis = i;
        }
        std::size_t axis = line_axis.value_or(0);
        std::vector<bool> bits;
        Point p = w.low_corner();
        for (std::int64_t c = w.axis(axis).lo; c <= w.axis(axis).hi; ++c) {
            p[axis] = c;
            bits.push_back(set().contains(p));
        }
        return {bits, w.axis(axis).lo};
    }

    void mh_check_cmd() {
        format({"json"}, "json");
        auto [bits, start] = word();
        auto v = mh_classify_1d(bits, start, f_.n_max);
        ordered_json j;
        j["certificate"] = v.certificate ? ordered_json(*v.certificate) : ordered_json(nullptr);
        j["factor_counts"] = v.factor_counts;
        j["period"] = v.period ? ordered_json(*v.period) : ordered_json(nullptr);
        j["preperiod_start"] = v.preperiod_start ? ordered_json(*v.preperiod_start) : ordered_json(nullptr);
        out_ << j.dump() << "\n";
    }

    void global_periods_cmd() {
        std::string fmt = format({"text", "json"}, "text");
        Grid g = rasterize(set(), window(), raster_options());
        auto found = global_period_search(g, f_.max_norm.value_or(3));
        if (fmt == "json") {
            out_ << ordered_json(found).dump() << "\n";
            return;
        }
        for (const auto& v : found) out_ << format_point(v) << "\n";
    }

    void repetitive_cmd() {
        std::string fmt = format({"text", "json"}, "text");
        std::int64_t t = required(f_.t, "--t");
        auto M = repetitivity_probe(set(), t, window());
        if (fmt == "json") {
            ordered_json j;
            j["t"] = t;
            j["M"] = M ? ordered_json(*M) : ordered_json(nullptr);
            out_ << j.dump() << "\n";
        } else {
            out_ << (M ? std::to_string(*M) : std::string("none")) << "\n";
        }
    }

    void classify_cmd() {
        format({"json"}, "json");
        ClassifyOptions o;
        o.window = optional_window();
        o.depth = f_.depth;
        if (f_.n_range) {
            auto [lo, hi] = n_range(1, 1);
            o.n_lo = lo;
            o.n_hi = hi;
        }
        o.max_sections = f_.max_sections;
        o.seed = f_.seed;
        o.limits = limits_;
        o.count = count_;
        out_ << to_json(classify_definability(set(), o)) << "\n";
    }

    void example_cmd() {
        std::string fmt = format({"text", "json"}, "text");
        if (fmt == "json") {
            ordered_json j = ordered_json::array();
            for (const auto& e : example_registry())
                j.push_back(ordered_json{{"name", e.name}, {"description", e.description}});
            out_ << j.dump(2) << "\n";
            return;
        }
        for (const auto& e : example_registry()) out_ << e.name << "\t" << e.description << "\n";
    }

    const Flags& f_;
    std::ostream& out_;
    EliminationLimits limits_;
    CountOptions count_;
    std::optional<PointSet> set_;
};

constexpr const char* kSubcommands[][2] = {
    {"parse", "Parse a formula and print it back"},
    {"qe", "Eliminate quantifiers and print the normal form"},
    {"eval", "Test membership of --point"},
    {"raster", "Render the set on --window"},
    {"complexity", "Block complexity p(n)"},
    {"recurrent", "Recurrent block complexity R(n)"},
    {"rect", "Rectangular block count for --sizes"},
    {"section", "Section at --axis (1-based) = --value"},
    {"border", "Border along --vector"},
    {"local-periods", "Smallest period inside B(--point, --K)"},
    {"verify-cert", "Check a local periodicity certificate on --window"},
    {"muchnik", "Sample Muchnik's condition for --K and --periods"},
    {"mh-check", "Morse-Hedlund test of a word or a line of the set"},
    {"global-periods", "Periods of the raster on --window"},
    {"repetitive", "Repetitivity radius for patches of size --t"},
    {"classify", "Empirical definability verdict"},
    {"example", "List the built-in examples"},
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Presburger definability toolkit", "defilab"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--formula", f.formula, "Formula text");
    app.add_option("--formula-file", f.formula_file, "File holding a formula ('#' comments allowed)");
    app.add_option("--example", f.example_name, "Built-in example name");
    app.add_option("--grid-json", f.grid_json, "Grid JSON file");
    app.add_option("--vars", f.vars, "Variable order for a formula, e.g. x,y");
    app.add_option("--window", f.window, "Window, e.g. x=-20..20,y=-20..20");
    app.add_option("--n", f.n_range, "Block sizes A..B");
    app.add_option("--format", f.format, "Output format")
        ->check(CLI::IsMember({"auto", "text", "csv", "json", "ascii", "pbm"}));
    app.add_option("--seed", f.seed, "Seed for sampled choices");
    app.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
    app.add_option("--budget-cells", f.budget_cells, "Cell budget for elimination");
    app.add_option("--budget-bits", f.budget_bits, "Coefficient bit budget for elimination");
    app.add_flag("--stabilize", f.stabilize, "Grow windows until counts stabilize");
    app.add_flag("--fit", f.fit, "Append a log-log growth fit");
    app.add_option("--point", f.point, "Point, e.g. 3,4");
    app.add_option("--vector", f.vector, "Vector, e.g. 1,0");
    app.add_option("--sizes", f.sizes, "Rectangle sizes, e.g. 3,2");
    app.add_option("--periods", f.periods, "Period set, e.g. 1,1;1,0");
    app.add_option("--cert", f.cert, "Certificate JSON text");
    app.add_option("--cert-file", f.cert_file, "Certificate JSON file");
    app.add_option("--word", f.word, "Binary word for mh-check");
    app.add_option("--axis", f.axis, "Axis (1-based)");
    app.add_option("--value", f.value, "Section constant");
    app.add_option("--K", f.K, "Neighborhood size");
    app.add_option("--escape", f.escape, "Escape radius L for recurrent counts");
    app.add_option("--max-norm", f.max_norm, "Largest period norm searched");
    app.add_option("--t", f.t, "Patch size");
    app.add_option("--n-max", f.n_max, "Largest factor length for mh-check");
    app.add_option("--depth", f.depth, "Section recursion depth");
    app.add_option("--max-sections", f.max_sections, "Sections examined per level");
    for (const auto& [name, description] : kSubcommands)
        app.add_subcommand(name, description)->callback([&f, n = std::string(name)] { f.subcommand = n; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        Command(f, out).run();
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace defilab
