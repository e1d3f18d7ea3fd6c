#include "opalg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "opalg/blowup.hpp"
#include "opalg/enveloping.hpp"
#include "opalg/hochschild.hpp"
#include "opalg/simplicial.hpp"
#include "opalg/verify.hpp"

namespace opalg {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"homology", "hochschild", "bv", "intersection", "blowup",
                                            "verify-operads"};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw InputError("JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

json betti_array(const std::map<int, int>& h, int lo, int hi) {
    json a = json::array();
    for (int k = lo; k <= hi; ++k) {
        auto it = h.find(k);
        a.push_back(it == h.end() ? 0 : it->second);
    }
    return a;
}

int betti_at(const std::map<int, int>& h, int k) {
    auto it = h.find(k);
    return it == h.end() ? 0 : it->second;
}

int read_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw InputError(where + " is not an integer");
    return j.get<int>();
}

// [[index, coefficient], ...] with indices below n
SparseVec read_vector(const json& j, int n, const Field& F, const std::string& where) {
    if (!j.is_array()) throw InputError(where + " must be an array of [index, coefficient] pairs");
    SparseVec v;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const std::string at = where + "[" + std::to_string(t) + "]";
        if (!j[t].is_array() || j[t].size() != 2) throw InputError(at + " must be [index, coefficient]");
        int i = read_int(j[t][0], at + "[0]");
        if (i < 0 || i >= n) throw InputError(at + "[0] is not a basis index");
        if (!j[t][1].is_number_integer()) throw InputError(at + "[1] is not an integer");
        SparseVec term{{i, F.from_int(j[t][1].get<long long>())}};
        if (term[0].second) axpy(v, 1, term, F);
    }
    return v;
}

struct AlgebraInput {
    std::shared_ptr<const FiniteDGA> A;
    std::shared_ptr<const EPlusAlgebra> E;
    std::optional<Duality> duality;
    std::string duality_failure;
    std::string kind;
};

void fill_dga(FiniteDGA& A, const json& j, const Field& F);

FiniteDGA read_dga(const json& j, const Field& F) {
    if (!j.contains("degrees") || !j["degrees"].is_array() || j["degrees"].empty())
        throw InputError("algebra: missing nonempty array 'degrees'");
    std::vector<int> degs;
    for (std::size_t i = 0; i < j["degrees"].size(); ++i)
        degs.push_back(read_int(j["degrees"][i], "algebra.degrees[" + std::to_string(i) + "]"));
    if (degs[0] != 0) throw InputError("algebra.degrees[0] must be 0 (the unit)");
    FiniteDGA A(F, degs);
    try {
        fill_dga(A, j, F);
        A.validate();
    } catch (const MathError& e) {
        throw InputError(std::string("algebra: ") + e.what());
    }
    return A;
}

void fill_dga(FiniteDGA& A, const json& j, const Field& F) {
    const int n = A.size();
    if (j.contains("products")) {
        const json& ps = j["products"];
        if (!ps.is_array()) throw InputError("algebra.products must be an array");
        for (std::size_t t = 0; t < ps.size(); ++t) {
            const std::string at = "algebra.products[" + std::to_string(t) + "]";
            if (!ps[t].is_array() || ps[t].size() != 3) throw InputError(at + " must be [left, right, value]");
            int a = read_int(ps[t][0], at + "[0]"), b = read_int(ps[t][1], at + "[1]");
            if (a <= 0 || a >= n || b <= 0 || b >= n) throw InputError(at + " does not name reduced basis elements");
            A.set_product(a, b, read_vector(ps[t][2], n, F, at + "[2]"));
        }
    }
    if (j.contains("differential")) {
        const json& ds = j["differential"];
        if (!ds.is_array()) throw InputError("algebra.differential must be an array");
        for (std::size_t t = 0; t < ds.size(); ++t) {
            const std::string at = "algebra.differential[" + std::to_string(t) + "]";
            if (!ds[t].is_array() || ds[t].size() != 2) throw InputError(at + " must be [source, value]");
            int a = read_int(ds[t][0], at + "[0]");
            if (a <= 0 || a >= n) throw InputError(at + "[0] is not a reduced basis element");
            A.set_d(a, read_vector(ds[t][1], n, F, at + "[1]"));
        }
    }
}

AlgebraInput load_algebra(const json& j, const Field& F) {
    AlgebraInput in;
    if (j.is_object() && j.contains("algebra")) {
        const json& a = j["algebra"];
        if (a.is_string() && a.get<std::string>() == "exterior") {
            int deg = j.contains("degree") ? read_int(j["degree"], "degree") : -1;
            if (deg < 1) throw InputError("exterior algebra: 'degree' must be a positive integer");
            in.A = std::make_shared<FiniteDGA>(exterior_algebra(F, deg));
            in.kind = "exterior";
        } else if (a.is_object()) {
            in.A = std::make_shared<FiniteDGA>(read_dga(a, F));
            in.kind = "dga";
        } else {
            throw InputError("'algebra' must be \"exterior\" or an object");
        }
        if (j.contains("duality")) {
            in.duality = Duality{read_vector(j["duality"], in.A->size(), F, "duality")};
        } else {
            try {
                in.duality = top_class_duality(*in.A);
            } catch (const MathError& e) {
                in.duality_failure = e.what();
            }
        }
        return in;
    }
    auto K = std::make_shared<const SimplicialComplex>(SimplicialComplexData::from_json(j));
    auto N = std::make_shared<NormalizedCochains>(K, F);
    in.A = std::make_shared<FiniteDGA>(N->dga());
    in.E = std::make_shared<EPlusAlgebra>(N->algebra());
    in.kind = "cochains";
    const int n = K->dimension();
    try {
        if (n < 1) throw InputError("a fundamental class needs positive dimension");
        SparseVec zeta = K->fundamental_chain(F);
        if (!K->is_cycle(zeta, F)) throw InputError("the fundamental chain is not a cycle");
        SparseVec gamma;
        for (auto& [s, c] : zeta) axpy(gamma, c, N->dual_of(n, s), F);
        in.duality = Duality{gamma};
    } catch (const InputError& e) {
        in.duality_failure = e.what();
    }
    return in;
}

json algebra_summary(const AlgebraInput& in) {
    json degs = json::array();
    for (int i = 0; i < in.A->size(); ++i) degs.push_back(in.A->degree(i));
    return {{"kind", in.kind}, {"dimension", in.A->size()}, {"degrees", degs}};
}

Perversity parse_perversity(const std::string& text, int n) {
    Perversity p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            p.v.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("perversity '" + text + "': '" + item + "' is not an integer");
        }
    }
    if (p.n() != n)
        throw InputError("perversity '" + text + "' needs " + std::to_string(n + 1) + " values (codimensions 0.." +
                         std::to_string(n) + ")");
    if (!is_gm(p)) throw InputError("perversity '" + text + "' is not a GM perversity");
    return p;
}

std::vector<Perversity> selected_perversities(const JobConfig& cfg, int n) {
    if (cfg.perversities.empty()) return gm_perversities(n);
    std::vector<Perversity> out;
    for (auto& s : cfg.perversities) {
        if (s == "all") return gm_perversities(n);
        out.push_back(parse_perversity(s, n));
    }
    return out;
}

json perversity_json(const Perversity& p) { return json(p.v); }

json tally_json(const Verification& V) {
    json a = json::array();
    for (auto& c : V.checks) a.push_back({{"name", c.name}, {"checked", c.checked}, {"failed", c.failed}});
    return a;
}

json cmd_homology(const JobConfig& cfg, const Field& F) {
    SimplicialComplex K(SimplicialComplexData::from_json(load_json(cfg.input)));
    json counts = json::array();
    for (int d = 0; d <= K.dimension(); ++d) counts.push_back(K.count(d));
    return {{"simplices", counts}, {"betti", betti_array(K.chain_complex(F).homology(), 0, K.dimension())}};
}

json enveloping_section(const JobConfig& cfg, const AlgebraInput& in) {
    auto E = in.E ? in.E : std::make_shared<const EPlusAlgebra>(commutative_as_eplus(*in.A));
    EnvAlgebra U(E, {cfg.env_arity, cfg.env_degree});
    auto C = U.complex(cfg.env_degree);
    json betti = json::array();
    for (auto& [deg, b] : C.C.homology())
        if (b) betti.push_back({{"degree", deg}, {"betti", b}});
    return {{"max_arity", cfg.env_arity},
            {"max_be_degree", cfg.env_degree},
            {"generators", U.num_generators()},
            {"relations", U.relation_count()},
            {"basis", static_cast<int>(U.basis().size())},
            {"betti", betti}};
}

json cmd_hochschild(const JobConfig& cfg, const Field& F) {
    AlgebraInput in = load_algebra(load_json(cfg.input), F);
    const int L = cfg.max_bar_length;
    auto W = std::make_shared<WordSpace>(in.A, L + 1);
    auto R = std::make_shared<Bimodule>(Bimodule::regular(*in.A));
    TruncationReport rep = hochschild_report(W, R, L, cfg.window_lo, cfg.window_hi);
    json rows = json::array();
    for (int q = cfg.window_lo; q <= cfg.window_hi; ++q)
        rows.push_back({{"degree", q},
                        {"betti", betti_at(rep.betti, q)},
                        {"betti_next", betti_at(rep.betti_next, q)},
                        {"stabilized", rep.stabilized.at(q)}});
    json out = {{"algebra", algebra_summary(in)}, {"max_bar_length", L}, {"degrees", rows}};
    if (cfg.env_arity > 0) out["enveloping"] = enveloping_section(cfg, in);
    return out;
}

// Coordinates of the class of a cocycle z of C in degree q against the
// classes of basis, or nullopt when z is not a cocycle combination.
std::optional<SparseVec> class_coordinates(const HochschildComplex& C, int q, const std::vector<HCochain>& basis,
                                           const HCochain& z) {
    const Field& F = C.words().algebra().field();
    ColumnReducer R(F, true);
    int nb = 0;
    if (C.dim(q - 1) > 0) {
        const SparseMatrix& D = C.diff(q - 1);
        for (int c = 0; c < D.cols(); ++c, ++nb) R.add(D.col(c));
    }
    for (auto& b : basis) R.add(C.to_local(b));
    SparseVec combo;
    if (!R.reduce(C.to_local(z), &combo).empty()) return std::nullopt;
    SparseVec out;
    for (auto& [i, c] : combo)
        if (i >= nb) out.push_back({i - nb, c});
    return out;
}

json cmd_bv(const JobConfig& cfg, const Field& F) {
    AlgebraInput in = load_algebra(load_json(cfg.input), F);
    const int L = cfg.max_bar_length;
    json out = {{"algebra", algebra_summary(in)}, {"max_bar_length", L}};
    if (!in.duality) {
        out["duality"] = {{"ok", false}, {"failure", in.duality_failure}};
        return out;
    }
    auto DA = std::make_shared<Bimodule>(Bimodule::dual(*in.A));
    DualityCheck chk = check_duality(*DA, *in.duality);
    json duality = {{"gamma", json::array()}, {"cocycle", chk.cocycle}, {"rank", chk.rank}, {"dim", chk.dim}};
    for (auto& [i, c] : in.duality->gamma) duality["gamma"].push_back({i, c});
    if (!chk.cocycle || !chk.bijective) {
        duality["ok"] = false;
        duality["failure"] = !chk.cocycle ? "Gamma is not a cocycle of DA"
                                          : "a -> a.Gamma is not bijective in homology";
        out["duality"] = duality;
        return out;
    }
    auto W = std::make_shared<WordSpace>(in.A, L);
    BVStructure S(W, *in.duality, L);
    duality["ok"] = S.duality_ok();
    if (!S.duality_ok()) duality["failure"] = S.failure();
    out["duality"] = duality;
    if (!S.duality_ok()) return out;
    BVReport rep = verify_bv(S, cfg.window_lo, cfg.window_hi);
    out["report"] = {{"generators", rep.generators},       {"delta_unit_zero", rep.delta_unit_zero},
                     {"b_dual_c_zero", rep.b_dual_c_zero}, {"pairs_checked", rep.pairs_checked},
                     {"pairs_failed", rep.pairs_failed},   {"delta_squared_failed", rep.delta_squared_failed}};
    json deltas = json::array();
    for (int q = cfg.window_lo; q <= cfg.window_hi; ++q) {
        auto src = S.hc(L).homology_basis(q);
        if (src.empty()) continue;
        auto dst = S.hc(L - 1).homology_basis(q - 1);
        json matrix = json::array();
        for (std::size_t r = 0; r < dst.size(); ++r) matrix.push_back(json::array());
        bool ok = true;
        for (auto& g : src) {
            auto coords = class_coordinates(S.hc(L - 1), q - 1, dst, S.delta(g));
            if (!coords) {
                ok = false;
                break;
            }
            for (std::size_t r = 0; r < dst.size(); ++r) matrix[r].push_back(coeff(*coords, static_cast<int>(r)));
        }
        deltas.push_back({{"degree", q},
                          {"rows", static_cast<int>(dst.size())},
                          {"cols", static_cast<int>(src.size())},
                          {"matrix", ok ? matrix : json(nullptr)}});
    }
    out["delta"] = deltas;
    return out;
}

std::shared_ptr<const FilteredComplex> load_filtered(const JobConfig& cfg) {
    auto d = SimplicialComplexData::from_json(load_json(cfg.input));
    return std::make_shared<const FilteredComplex>(FilteredComplex::from_data(d));
}

json cmd_intersection(const JobConfig& cfg, const Field& F) {
    auto X = load_filtered(cfg);
    const int n = X->n();
    std::map<Perversity, std::map<int, int>> cache;
    auto homology = [&](const Perversity& p) -> const std::map<int, int>& {
        auto it = cache.find(p);
        if (it == cache.end()) it = cache.emplace(p, intersection_chains(*X, p, F).C.homology()).first;
        return it->second;
    };
    json rows = json::array();
    for (auto& p : selected_perversities(cfg, n)) {
        const Perversity q = perv_dual(p);
        const auto& hp = homology(p);
        const auto& hq = homology(q);
        bool dual = true;
        for (int k = 0; k <= n; ++k) dual = dual && betti_at(hp, k) == betti_at(hq, n - k);
        rows.push_back({{"perversity", perversity_json(p)},
                        {"betti", betti_array(hp, 0, n)},
                        {"dual_perversity", perversity_json(q)},
                        {"dual_betti", betti_array(hq, 0, n)},
                        {"poincare_duality", dual}});
    }
    return {{"formal_dimension", n}, {"perversities", rows}};
}

json cmd_blowup(const JobConfig& cfg, const Field& F) {
    auto X = load_filtered(cfg);
    const int n = X->n();
    BlowupCochains N(X, F);
    json fundamental = {{"available", true}};
    try {
        fundamental_cycle(*X, F);
    } catch (const InputError& e) {
        fundamental = {{"available", false}, {"reason", e.what()}};
    }
    json rows = json::array();
    for (auto& p : selected_perversities(cfg, n)) {
        const Perversity q = perv_dual(p);
        auto hp = N.betti(p);
        auto iq = intersection_chains(*X, q, F).C.homology();
        bool equal = true;
        for (int k = 0; k <= n; ++k) equal = equal && betti_at(hp, k) == betti_at(iq, k);
        json row = {{"perversity", perversity_json(p)},
                    {"betti", betti_array(hp, 0, n)},
                    {"dual_perversity", perversity_json(q)},
                    {"intersection_betti_dual", betti_array(iq, 0, n)},
                    {"betti_match", equal}};
        if (fundamental["available"].get<bool>()) {
            CapDuality D = cap_duality(N, p);
            row["cap"] = {{"chain_map", D.chain_map},
                          {"bijective", D.bijective},
                          {"induced_rank", betti_array(D.induced_rank, 0, n)},
                          {"target_betti", betti_array(D.target_betti, 0, n)}};
        }
        rows.push_back(row);
    }
    return {{"formal_dimension", n}, {"fundamental_cycle", fundamental}, {"perversities", rows}};
}

json cmd_verify_operads(const JobConfig& cfg, const Field& F) {
    Verification P = verify_permutation_operad(3, cfg.samples, cfg.seed);
    Verification B = verify_barratt_eccles(F, 4, 5, cfg.samples, cfg.seed + 1);
    return {{"permutation_operad", tally_json(P)},
            {"barratt_eccles", tally_json(B)},
            {"samples", cfg.samples},
            {"seed", cfg.seed},
            {"ok", P.ok() && B.ok()}};
}

}  // namespace

void JobConfig::validate() const {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
        throw InputError("unknown command '" + command + "'");
    if (command != "verify-operads" && input.empty()) throw InputError(command + ": an input file is required");
    if (!is_prime(field)) throw InputError("--field " + std::to_string(field) + " is not a prime");
    if (max_bar_length < 0) throw InputError("--max-bar-length must be nonnegative");
    if (command == "bv" && max_bar_length < 2) throw InputError("bv: --max-bar-length must be at least 2");
    if (window_lo > window_hi) throw InputError("--window must satisfy lo <= hi");
    if (env_arity < 0 || env_arity > 4) throw InputError("--env-arity must lie in 0..4");
    if (env_degree < 0 || env_degree > 4) throw InputError("--env-degree must lie in 0..4");
    if (samples < 0) throw InputError("--samples must be nonnegative");
}

json run_job(const JobConfig& cfg) {
    cfg.validate();
    Field F(cfg.field);
    json out;
    if (cfg.command == "homology")
        out = cmd_homology(cfg, F);
    else if (cfg.command == "hochschild")
        out = cmd_hochschild(cfg, F);
    else if (cfg.command == "bv")
        out = cmd_bv(cfg, F);
    else if (cfg.command == "intersection")
        out = cmd_intersection(cfg, F);
    else if (cfg.command == "blowup")
        out = cmd_blowup(cfg, F);
    else
        out = cmd_verify_operads(cfg, F);
    out["command"] = cfg.command;
    out["field"] = cfg.field;
    if (cfg.command == "hochschild" || cfg.command == "bv") out["window"] = {cfg.window_lo, cfg.window_hi};
    return out;
}

json error_report(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

void parse_window(const std::string& text, int& lo, int& hi) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw InputError("--window expects lo:hi, got '" + text + "'");
    try {
        std::size_t a = 0, b = 0;
        lo = std::stoi(text.substr(0, colon), &a);
        hi = std::stoi(text.substr(colon + 1), &b);
        if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw InputError("--window expects integers lo:hi, got '" + text + "'");
    }
    if (lo > hi) throw InputError("--window expects lo <= hi, got '" + text + "'");
}

}  // namespace opalg
