#pragma once

// Noncontextual value-assignment machinery. A ContextTable groups named +/-1
// observables into mutually commuting contexts; each context carries the
// product value forced by the operator algebra (or, when the table carries a
// witness state, by the eigenvalue equation on that state). On top of it:
//
//   * verify_table         numerically re-checks commutation and the required
//                          products, returning per-context residuals
//   * search_assignments   exhaustive scan of all 2^N noncontextual value
//                          assignments against the per-context product rule
//   * parity_obstruction   GF(2) certificate of unsatisfiability: a subset of
//                          contexts covering every observable an even number
//                          of times whose required products multiply to -1
//   * parse_context_table  text format: `obs <name> <pauli-spec>`,
//     / load_context_table `ctx <+/-1> <names...>`, optional
//                          `state <re> <im> ...` witness, `#` comments
//   * mermin_square_table  the two built-in tables from the two-spin square
//     / ghz_table          and the three-spin GHZ argument

#include <ppsim/hilbert.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppsim {

// Error type for the table text format; the message always carries the
// offending line number.
class TableParseError : public std::runtime_error {
  public:
    TableParseError(const std::string& source, int line, const std::string& what)
        : std::runtime_error(source + ": line " + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

// Named +/-1 observables grouped into contexts. `required_product` is the
// value the product of a context's outcomes must take; it is stored with the
// table and re-derived numerically by verify_table, never trusted. A table
// may carry a witness state: its contexts are then eigenvalue statements on
// that state rather than operator identities.
template <typename T = double>
class ContextTable {
  public:
    struct Context {
        std::vector<int> members;
        T required_product;
    };

    ContextTable(std::vector<SpectralObservable<T>> observables, std::vector<Context> contexts,
                 std::optional<StateVector<T>> witness = std::nullopt)
        : observables_(std::move(observables)),
          contexts_(std::move(contexts)),
          witness_(std::move(witness)) {
        if (observables_.empty()) {
            throw std::invalid_argument("ContextTable: no observables");
        }
        const int dim = observables_.front().dim();
        std::map<std::string, int> seen;
        for (std::size_t i = 0; i < observables_.size(); ++i) {
            const auto& obs = observables_[i];
            if (obs.dim() != dim) {
                throw std::invalid_argument("ContextTable: observable dimension mismatch");
            }
            if (obs.name().empty()) {
                throw std::invalid_argument("ContextTable: observable needs a name");
            }
            if (!seen.emplace(obs.name(), static_cast<int>(i)).second) {
                throw std::invalid_argument("ContextTable: duplicate observable name '" +
                                            obs.name() + "'");
            }
            for (const auto& [eigenvalue, projector] : obs.spectrum()) {
                if (std::abs(std::abs(eigenvalue) - T(1)) > algebra_tol<T>) {
                    throw std::invalid_argument("ContextTable: observable '" + obs.name() +
                                                "' has an eigenvalue outside {+1, -1}");
                }
            }
        }
        for (const auto& ctx : contexts_) {
            if (ctx.members.empty()) {
                throw std::invalid_argument("ContextTable: empty context");
            }
            std::vector<bool> used(observables_.size(), false);
            for (int m : ctx.members) {
                if (m < 0 || m >= static_cast<int>(observables_.size())) {
                    throw std::invalid_argument("ContextTable: context member out of range");
                }
                if (used[static_cast<std::size_t>(m)]) {
                    throw std::invalid_argument("ContextTable: repeated member '" +
                                                observables_[static_cast<std::size_t>(m)].name() +
                                                "' in one context");
                }
                used[static_cast<std::size_t>(m)] = true;
            }
            if (std::abs(std::abs(ctx.required_product) - T(1)) > algebra_tol<T>) {
                throw std::invalid_argument("ContextTable: required product must be +1 or -1");
            }
        }
        if (witness_ && witness_->dim() != dim) {
            throw std::invalid_argument("ContextTable: witness dimension mismatch");
        }
        name_to_index_ = std::move(seen);
    }

    const std::vector<SpectralObservable<T>>& observables() const { return observables_; }
    const std::vector<Context>& contexts() const { return contexts_; }
    const std::optional<StateVector<T>>& witness() const { return witness_; }

    int index_of(const std::string& name) const {
        const auto it = name_to_index_.find(name);
        if (it == name_to_index_.end()) {
            throw std::invalid_argument("ContextTable: unknown observable '" + name + "'");
        }
        return it->second;
    }

    // Human-readable label used in verification errors and reports.
    std::string context_label(int c) const {
        std::string label = "context " + std::to_string(c) + " (";
        const auto& ctx = contexts_[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < ctx.members.size(); ++i) {
            label += observables_[static_cast<std::size_t>(ctx.members[i])].name();
            label += (i + 1 < ctx.members.size()) ? " " : "";
        }
        return label + ")";
    }

  private:
    std::vector<SpectralObservable<T>> observables_;
    std::vector<Context> contexts_;
    std::optional<StateVector<T>> witness_;
    std::map<std::string, int> name_to_index_;
};

// Per-context residuals from verify_table: the largest pairwise commutator
// norm among members, and the distance of the member product from
// required_product * identity (or from required_product * witness when the
// table carries one).
template <typename T = double>
struct VerifyReport {
    struct ContextResidual {
        T commutator;
        T product;
    };
    std::vector<ContextResidual> contexts;
    T max_commutator = T(0);
    T max_product = T(0);
};

template <typename T>
VerifyReport<T> verify_table(const ContextTable<T>& table, T commutator_tol = T(1e-10),
                             T product_tol = T(1e-8)) {
    VerifyReport<T> report;
    const int dim = table.observables().front().dim();
    const Matrix<T> eye = identity<T>(dim);
    for (std::size_t c = 0; c < table.contexts().size(); ++c) {
        const auto& ctx = table.contexts()[c];
        T commutator = T(0);
        for (std::size_t i = 0; i < ctx.members.size(); ++i) {
            const Matrix<T>& a =
                table.observables()[static_cast<std::size_t>(ctx.members[i])].op();
            for (std::size_t j = i + 1; j < ctx.members.size(); ++j) {
                const Matrix<T>& b =
                    table.observables()[static_cast<std::size_t>(ctx.members[j])].op();
                commutator = std::max(commutator, T((a * b - b * a).norm()));
            }
        }
        Matrix<T> product = eye;
        for (int m : ctx.members) {
            product = (product * table.observables()[static_cast<std::size_t>(m)].op()).eval();
        }
        T product_residual;
        if (table.witness()) {
            const Vector<T>& psi = table.witness()->amps();
            product_residual = T((product * psi - ctx.required_product * psi).norm());
        } else {
            product_residual = T((product - ctx.required_product * eye).norm());
        }
        if (commutator > commutator_tol) {
            throw std::invalid_argument("verify_table: members of " +
                                        table.context_label(static_cast<int>(c)) +
                                        " do not commute");
        }
        if (product_residual > product_tol) {
            throw std::invalid_argument("verify_table: product constraint fails for " +
                                        table.context_label(static_cast<int>(c)));
        }
        report.contexts.push_back({commutator, product_residual});
        report.max_commutator = std::max(report.max_commutator, commutator);
        report.max_product = std::max(report.max_product, product_residual);
    }
    return report;
}

// A total noncontextual value assignment: every observable gets +1 or -1.
template <typename T = double>
struct Assignment {
    std::map<std::string, T> values;
};

// All assignments satisfying every context's product constraint, enumerated
// exhaustively in lexicographic order (first observable most significant,
// +1 before -1).
template <typename T>
std::vector<Assignment<T>> search_assignments(const ContextTable<T>& table) {
    const int n = static_cast<int>(table.observables().size());
    if (n > 30) {
        throw std::invalid_argument("search_assignments: more than 30 observables");
    }
    std::vector<Assignment<T>> hits;
    const std::uint64_t total = std::uint64_t(1) << n;
    std::vector<T> values(static_cast<std::size_t>(n));
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int i = 0; i < n; ++i) {
            const bool minus = (mask >> (n - 1 - i)) & 1u;
            values[static_cast<std::size_t>(i)] = minus ? T(-1) : T(1);
        }
        bool ok = true;
        for (const auto& ctx : table.contexts()) {
            T product = T(1);
            for (int m : ctx.members) {
                product *= values[static_cast<std::size_t>(m)];
            }
            if (product != ctx.required_product) {
                ok = false;
                break;
            }
        }
        if (ok) {
            Assignment<T> a;
            for (int i = 0; i < n; ++i) {
                a.values.emplace(table.observables()[static_cast<std::size_t>(i)].name(),
                                 values[static_cast<std::size_t>(i)]);
            }
            hits.push_back(std::move(a));
        }
    }
    return hits;
}

// Unsatisfiability certificate: indices of a context subset in which every
// observable appears an even number of times while the required products
// multiply to -1. Any value assignment would give that subset's outcome
// product +1 (every factor squares away), so no assignment can satisfy all
// contexts. Found by GF(2) elimination; returns std::nullopt when no such
// subset exists.
template <typename T>
std::optional<std::vector<int>> parity_obstruction(const ContextTable<T>& table) {
    const std::size_t n_obs = table.observables().size();
    const std::size_t n_ctx = table.contexts().size();
    // Row c: membership bits of context c plus one sign bit (1 iff required
    // product is -1). combos[c] tracks which original contexts were xored in.
    std::vector<std::vector<std::uint8_t>> rows(n_ctx,
                                                std::vector<std::uint8_t>(n_obs + 1, 0));
    std::vector<std::vector<std::uint8_t>> combos(n_ctx,
                                                  std::vector<std::uint8_t>(n_ctx, 0));
    for (std::size_t c = 0; c < n_ctx; ++c) {
        for (int m : table.contexts()[c].members) {
            rows[c][static_cast<std::size_t>(m)] ^= 1u;
        }
        rows[c][n_obs] = table.contexts()[c].required_product < T(0) ? 1u : 0u;
        combos[c][c] = 1u;
    }
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < n_obs && pivot_row < n_ctx; ++col) {
        std::size_t pivot = pivot_row;
        while (pivot < n_ctx && rows[pivot][col] == 0) {
            ++pivot;
        }
        if (pivot == n_ctx) {
            continue;
        }
        std::swap(rows[pivot], rows[pivot_row]);
        std::swap(combos[pivot], combos[pivot_row]);
        for (std::size_t r = 0; r < n_ctx; ++r) {
            if (r != pivot_row && rows[r][col] != 0) {
                for (std::size_t k = 0; k <= n_obs; ++k) {
                    rows[r][k] ^= rows[pivot_row][k];
                }
                for (std::size_t k = 0; k < n_ctx; ++k) {
                    combos[r][k] ^= combos[pivot_row][k];
                }
            }
        }
        ++pivot_row;
    }
    for (std::size_t r = 0; r < n_ctx; ++r) {
        bool zero = true;
        for (std::size_t k = 0; k < n_obs; ++k) {
            if (rows[r][k] != 0) {
                zero = false;
                break;
            }
        }
        if (zero && rows[r][n_obs] != 0) {
            std::vector<int> subset;
            for (std::size_t k = 0; k < n_ctx; ++k) {
                if (combos[r][k] != 0) {
                    subset.push_back(static_cast<int>(k));
                }
            }
            return subset;
        }
    }
    return std::nullopt;
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

inline std::pair<int, Axis> parse_pauli_site(const std::string& source, int line,
                                             const std::string& token) {
    const auto at = token.find('@');
    if (at != 1 || token.size() < 3) {
        throw TableParseError(source, line,
                              "bad pauli factor '" + token + "' (expected e.g. x@0)");
    }
    Axis axis;
    switch (token[0]) {
        case 'x': axis = Axis::x; break;
        case 'y': axis = Axis::y; break;
        case 'z': axis = Axis::z; break;
        default:
            throw TableParseError(source, line, "unknown pauli axis in '" + token + "'");
    }
    int site = 0;
    try {
        std::size_t used = 0;
        site = std::stoi(token.substr(2), &used);
        if (used != token.size() - 2) {
            throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw TableParseError(source, line, "bad site index in '" + token + "'");
    }
    if (site < 0) {
        throw TableParseError(source, line, "negative site index in '" + token + "'");
    }
    return {site, axis};
}

}  // namespace detail

// Parses the table text format. Lines: `obs <name> <pauli-spec...>` declares
// a Pauli-string observable (`x@0 y@1` acts on sites 0 and 1); `ctx <+/-1>
// <names...>` declares a context; `state <re> <im> ...` supplies an optional
// witness state (amplitude pairs, most significant site first); `#` starts a
// comment. The number of spin sites is the largest site index used plus one.
template <typename T = double>
ContextTable<T> parse_context_table(std::istream& in, const std::string& source = "<table>") {
    struct ObsLine {
        int line;
        std::string name;
        std::vector<std::pair<int, Axis>> factors;
    };
    struct CtxLine {
        int line;
        T required;
        std::vector<std::string> members;
    };
    std::vector<ObsLine> obs_lines;
    std::vector<CtxLine> ctx_lines;
    std::vector<T> state_values;
    int state_line = 0;

    std::string line;
    int line_no = 0;
    int max_site = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto tokens = detail::split_ws(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens[0] == "obs") {
            if (tokens.size() < 3) {
                throw TableParseError(source, line_no, "obs needs a name and pauli factors");
            }
            ObsLine o;
            o.line = line_no;
            o.name = tokens[1];
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                o.factors.push_back(detail::parse_pauli_site(source, line_no, tokens[i]));
                max_site = std::max(max_site, o.factors.back().first);
            }
            obs_lines.push_back(std::move(o));
        } else if (tokens[0] == "ctx") {
            if (tokens.size() < 3) {
                throw TableParseError(source, line_no, "ctx needs a sign and member names");
            }
            CtxLine c;
            c.line = line_no;
            if (tokens[1] == "+1" || tokens[1] == "1") {
                c.required = T(1);
            } else if (tokens[1] == "-1") {
                c.required = T(-1);
            } else {
                throw TableParseError(source, line_no,
                                      "context sign must be +1 or -1, got '" + tokens[1] + "'");
            }
            c.members.assign(tokens.begin() + 2, tokens.end());
            ctx_lines.push_back(std::move(c));
        } else if (tokens[0] == "state") {
            if (state_line != 0) {
                throw TableParseError(source, line_no, "duplicate state line");
            }
            if (tokens.size() < 3 || (tokens.size() - 1) % 2 != 0) {
                throw TableParseError(source, line_no,
                                      "state needs real/imaginary amplitude pairs");
            }
            state_line = line_no;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                try {
                    std::size_t used = 0;
                    state_values.push_back(static_cast<T>(std::stod(tokens[i], &used)));
                    if (used != tokens[i].size()) {
                        throw std::invalid_argument("trailing characters");
                    }
                } catch (const std::exception&) {
                    throw TableParseError(source, line_no,
                                          "bad amplitude '" + tokens[i] + "'");
                }
            }
        } else {
            throw TableParseError(source, line_no, "unknown directive '" + tokens[0] + "'");
        }
    }
    if (obs_lines.empty()) {
        throw TableParseError(source, line_no, "table declares no observables");
    }

    const int n_sites = max_site + 1;
    std::vector<SpectralObservable<T>> observables;
    std::map<std::string, int> index;
    for (const auto& o : obs_lines) {
        if (index.count(o.name) != 0) {
            throw TableParseError(source, o.line, "duplicate observable '" + o.name + "'");
        }
        try {
            observables.push_back(pauli_string<T>(o.factors, n_sites, o.name));
        } catch (const std::exception& e) {
            throw TableParseError(source, o.line, e.what());
        }
        index.emplace(o.name, static_cast<int>(observables.size()) - 1);
    }
    std::vector<typename ContextTable<T>::Context> contexts;
    for (const auto& c : ctx_lines) {
        typename ContextTable<T>::Context ctx;
        ctx.required_product = c.required;
        for (const auto& name : c.members) {
            const auto it = index.find(name);
            if (it == index.end()) {
                throw TableParseError(source, c.line, "unknown observable '" + name + "'");
            }
            ctx.members.push_back(it->second);
        }
        contexts.push_back(std::move(ctx));
    }
    std::optional<StateVector<T>> witness;
    if (!state_values.empty()) {
        const std::size_t dim = std::size_t(1) << n_sites;
        if (state_values.size() != 2 * dim) {
            throw TableParseError(source, state_line,
                                  "state needs " + std::to_string(2 * dim) +
                                      " numbers for " + std::to_string(n_sites) +
                                      " sites, got " + std::to_string(state_values.size()));
        }
        Vector<T> amps(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            amps[static_cast<Eigen::Index>(i)] =
                complex_t<T>(state_values[2 * i], state_values[2 * i + 1]);
        }
        try {
            witness.emplace(amps);
        } catch (const std::exception& e) {
            throw TableParseError(source, state_line, e.what());
        }
    }
    try {
        return ContextTable<T>(std::move(observables), std::move(contexts), std::move(witness));
    } catch (const std::exception& e) {
        throw TableParseError(source, line_no, e.what());
    }
}

template <typename T = double>
ContextTable<T> load_context_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open table file: " + path);
    }
    return parse_context_table<T>(in, path);
}

// The two-spin square: three rows multiplying to +identity, third column to
// -identity. Nine observables, six contexts, no consistent assignment.
template <typename T = double>
ContextTable<T> mermin_square_table() {
    std::vector<SpectralObservable<T>> obs;
    obs.push_back(pauli_string<T>({{0, Axis::x}}, 2, "X1"));
    obs.push_back(pauli_string<T>({{1, Axis::x}}, 2, "X2"));
    obs.push_back(pauli_string<T>({{0, Axis::x}, {1, Axis::x}}, 2, "X1X2"));
    obs.push_back(pauli_string<T>({{1, Axis::y}}, 2, "Y2"));
    obs.push_back(pauli_string<T>({{0, Axis::y}}, 2, "Y1"));
    obs.push_back(pauli_string<T>({{0, Axis::y}, {1, Axis::y}}, 2, "Y1Y2"));
    obs.push_back(pauli_string<T>({{0, Axis::x}, {1, Axis::y}}, 2, "X1Y2"));
    obs.push_back(pauli_string<T>({{0, Axis::y}, {1, Axis::x}}, 2, "Y1X2"));
    obs.push_back(pauli_string<T>({{0, Axis::z}, {1, Axis::z}}, 2, "Z1Z2"));
    using Ctx = typename ContextTable<T>::Context;
    std::vector<Ctx> contexts = {
        Ctx{{0, 1, 2}, T(1)},   // row 1: X1 X2 X1X2
        Ctx{{3, 4, 5}, T(1)},   // row 2: Y2 Y1 Y1Y2
        Ctx{{6, 7, 8}, T(1)},   // row 3: X1Y2 Y1X2 Z1Z2
        Ctx{{0, 3, 6}, T(1)},   // column 1: X1 Y2 X1Y2
        Ctx{{1, 4, 7}, T(1)},   // column 2: X2 Y1 Y1X2
        Ctx{{2, 5, 8}, T(-1)},  // column 3: X1X2 Y1Y2 Z1Z2
    };
    return ContextTable<T>(std::move(obs), std::move(contexts));
}

// Three spins prepared in (|up up up> - |down down down>)/sqrt(2): the four
// products x1y2y3, y1x2y3, y1y2x3 (+1 each) and x1x2x3 (-1) are definite on
// that state, but no +/-1 assignment to the six single-spin observables
// reproduces them. The state rides along as the table's witness.
template <typename T = double>
ContextTable<T> ghz_table() {
    std::vector<SpectralObservable<T>> obs;
    obs.push_back(pauli_string<T>({{0, Axis::x}}, 3, "X1"));
    obs.push_back(pauli_string<T>({{1, Axis::x}}, 3, "X2"));
    obs.push_back(pauli_string<T>({{2, Axis::x}}, 3, "X3"));
    obs.push_back(pauli_string<T>({{0, Axis::y}}, 3, "Y1"));
    obs.push_back(pauli_string<T>({{1, Axis::y}}, 3, "Y2"));
    obs.push_back(pauli_string<T>({{2, Axis::y}}, 3, "Y3"));
    using Ctx = typename ContextTable<T>::Context;
    std::vector<Ctx> contexts = {
        Ctx{{0, 4, 5}, T(1)},   // x1 y2 y3
        Ctx{{3, 1, 5}, T(1)},   // y1 x2 y3
        Ctx{{3, 4, 2}, T(1)},   // y1 y2 x3
        Ctx{{0, 1, 2}, T(-1)},  // x1 x2 x3
    };
    Vector<T> amps = Vector<T>::Zero(8);
    amps[0] = complex_t<T>(1, 0) / std::sqrt(T(2));
    amps[7] = complex_t<T>(-1, 0) / std::sqrt(T(2));
    return ContextTable<T>(std::move(obs), std::move(contexts),
                           StateVector<T>(amps, {2, 2, 2}));
}

}  // namespace ppsim
