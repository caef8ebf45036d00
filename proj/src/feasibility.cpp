#include "noma/feasibility.hpp"

#include "noma/simplex.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <ostream>
#include <sstream>

namespace noma {

namespace {

MatrixQ incidence_q(const VirtualUserFamily& family) {
  return family.incidence().cast<Rational>();
}

void check_share_vector(const VirtualUserFamily& family, const VectorQ& w) {
  if (w.size() != family.users()) {
    throw InvalidArgument("share vector has " + std::to_string(w.size()) + " entries, expected " +
                          std::to_string(family.users()));
  }
}

Integer gcd_of_numerators(const VectorQ& v) {
  Integer g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = gcd(g, Integer(abs(numerator(v(i)))));
  return g;
}

// Positive factor turning v into a primitive integer vector (1 for the zero vector).
Rational primitive_scale(const VectorQ& v) {
  std::vector<Rational> entries(v.data(), v.data() + v.size());
  Rational scale = Rational(denominator_lcm(entries));
  Integer g = gcd_of_numerators(VectorQ(v * scale));
  if (g == 0) return Rational(1);
  return scale / Rational(g);
}

std::string key_of(const VectorQ& v) {
  std::string key;
  for (Eigen::Index i = 0; i < v.size(); ++i) key += to_string(v(i)) + ' ';
  return key;
}

LinearInequality scaled(const LinearInequality& row, const Rational& s) {
  return {VectorQ(row.w_coef * s), VectorQ(row.a_coef * s), row.constant * s, row.label};
}

std::optional<RegionInequality> normalize(const VectorQ& coef, const Rational& rhs) {
  const Rational s = primitive_scale(coef);
  RegionInequality out{VectorQ(coef * s), rhs * s};
  if (out.coef.isZero()) {
    if (out.rhs <= 0) return std::nullopt;  // tautology
    out.rhs = 1;
  }
  return out;
}

}  // namespace

std::optional<FeasibilityCertificate> check_feasibility_equality(const VirtualUserFamily& family, const VectorQ& w) {
  check_share_vector(family, w);
  const auto n = static_cast<Eigen::Index>(family.users());
  const auto m = static_cast<Eigen::Index>(family.size());
  MatrixQ A(n + 1, m);
  A.topRows(n) = incidence_q(family);
  A.row(n).setOnes();
  VectorQ b(n + 1);
  b.head(n) = w;
  b(n) = 1;
  auto lp = simplex_maximize<Rational>(std::move(A), std::move(b), VectorQ::Zero(m));
  if (lp.status != LpStatus::Optimal) return std::nullopt;
  return FeasibilityCertificate{lp.x};
}

std::optional<BoxWitness> check_feasibility_box(const VirtualUserFamily& family, const ExactDemands& demands) {
  demands.validate();
  if (demands.users() != family.users()) throw InvalidArgument("demands do not match the family");
  const auto m = static_cast<Eigen::Index>(family.size());
  const MatrixQ inc = incidence_q(family);
  LinearProgram<Rational> lp(m);
  lp.add(VectorQ::Ones(m), Sense::Equal, Rational(1));
  for (Eigen::Index i = 0; i < inc.rows(); ++i) {
    if (demands.lower(i) == demands.upper(i)) {
      lp.add(inc.row(i).transpose(), Sense::Equal, demands.lower(i));
      continue;
    }
    if (demands.lower(i) > 0) lp.add(inc.row(i).transpose(), Sense::GreaterEqual, demands.lower(i));
    if (demands.upper(i) < 1) lp.add(inc.row(i).transpose(), Sense::LessEqual, demands.upper(i));
  }
  auto result = lp.maximize();
  if (result.status != LpStatus::Optimal) return std::nullopt;
  return BoxWitness{VectorQ(inc * result.x), FeasibilityCertificate{result.x}};
}

bool verify_certificate(const VirtualUserFamily& family, const VectorQ& w, const FeasibilityCertificate& cert) {
  if (cert.a.size() != static_cast<Eigen::Index>(family.size()) || w.size() != family.users()) return false;
  for (Eigen::Index j = 0; j < cert.a.size(); ++j) {
    if (cert.a(j) < 0) return false;
  }
  if (cert.a.sum() != 1) return false;
  return VectorQ(incidence_q(family) * cert.a) == w;
}

std::vector<std::size_t> wrr_pattern(const FeasibilityCertificate& cert, std::size_t max_period) {
  std::vector<Rational> entries(cert.a.data(), cert.a.data() + cert.a.size());
  const Integer period = denominator_lcm(entries);
  if (period > max_period) throw ResourceLimitError("WRR period " + period.str() + " exceeds cap");
  std::vector<std::size_t> pattern;
  for (Eigen::Index j = 0; j < cert.a.size(); ++j) {
    Rational count = cert.a(j) * Rational(period);
    if (denominator(count) != 1 || count < 0) throw InvalidArgument("certificate weights must be nonnegative");
    pattern.insert(pattern.end(), numerator(count).convert_to<std::size_t>(), static_cast<std::size_t>(j));
  }
  if (pattern.size() != period.convert_to<std::size_t>()) throw InvalidArgument("certificate weights must sum to 1");
  return pattern;
}

void write_certificate(std::ostream& out, const VirtualUserFamily& family, const FeasibilityCertificate& cert) {
  for (std::size_t j = 0; j < family.size(); ++j) {
    out << family[j].to_string() << ' ' << to_string(cert.a(static_cast<Eigen::Index>(j))) << '\n';
  }
}

EliminatedSystem eliminate_equalities(const VirtualUserFamily& family) {
  const int n = family.users();
  const auto m = static_cast<Eigen::Index>(family.size());
  const Eigen::Index rows = n + 1;
  // [E | rhs constant | rhs w-coefficients]; rhs of coverage row i is w_i, of the sum row 1.
  MatrixQ t = MatrixQ::Zero(rows, m + 1 + n);
  t.block(0, 0, n, m) = incidence_q(family);
  t.row(n).head(m).setOnes();
  for (int i = 0; i < n; ++i) t(i, m + 1 + i) = 1;
  t(n, m) = 1;

  std::vector<Eigen::Index> pivots;
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < m && rank < rows; ++col) {
    Eigen::Index r = rank;
    while (r < rows && t(r, col) == 0) ++r;
    if (r == rows) continue;
    t.row(r).swap(t.row(rank));
    t.row(rank) /= Rational(t(rank, col));
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == rank || t(i, col) == 0) continue;
      const Rational f = t(i, col);
      t.row(i) -= f * t.row(rank);
    }
    pivots.push_back(col);
    ++rank;
  }

  EliminatedSystem out;
  out.users = n;
  for (Eigen::Index col = 0; col < m; ++col) {
    if (std::find(pivots.begin(), pivots.end(), col) != pivots.end()) {
      out.eliminated.push_back(static_cast<std::size_t>(col));
    } else {
      out.residual.push_back(static_cast<std::size_t>(col));
    }
  }
  const auto k = static_cast<Eigen::Index>(out.residual.size());

  auto emit = [&](LinearInequality row) {
    if (row.a_coef.isZero()) {
      out.direct.push_back(std::move(row));
    } else {
      out.rows.push_back(std::move(row));
    }
  };
  for (Eigen::Index r = 0; r < rank; ++r) {
    LinearInequality row{t.row(r).segment(m + 1, n).transpose(), VectorQ(k), t(r, m), ""};
    for (Eigen::Index c = 0; c < k; ++c) row.a_coef(c) = -t(r, static_cast<Eigen::Index>(out.residual[c]));
    row.label = "a" + family[static_cast<std::size_t>(pivots[r])].to_string();
    emit(std::move(row));
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    LinearInequality row{VectorQ::Zero(n), VectorQ::Zero(k), Rational(0), ""};
    row.a_coef(c) = 1;
    row.label = "a" + family[out.residual[static_cast<std::size_t>(c)]].to_string();
    emit(std::move(row));
  }
  // Remaining rows read 0 = rhs(w): a consistency condition on w alone.
  for (Eigen::Index r = rank; r < rows; ++r) {
    LinearInequality row{t.row(r).segment(m + 1, n).transpose(), VectorQ::Zero(k), t(r, m), "consistency"};
    if (row.w_coef.isZero() && row.constant == 0) continue;
    out.direct.push_back(row);
    out.direct.push_back(scaled(row, Rational(-1)));
  }
  return out;
}

DualSystem dual_system(const EliminatedSystem& system) {
  DualSystem dual;
  std::map<std::string, std::size_t> class_of;
  for (std::size_t r = 0; r < system.rows.size(); ++r) {
    LinearInequality row = scaled(system.rows[r], primitive_scale(system.rows[r].a_coef));
    // Plain a_j >= 0 rows keep their own variable; only substituted rows share one.
    const bool plain = row.constant == 0 && row.w_coef.isZero();
    const std::string key = plain ? "#" + std::to_string(r) : key_of(row.a_coef);
    auto [it, inserted] = class_of.emplace(key, dual.classes.size());
    if (inserted) {
      dual.classes.emplace_back();
      dual.labels.push_back(row.label);
    } else {
      dual.labels[it->second] += "|" + row.label;
    }
    dual.classes[it->second].push_back(r);
    dual.scaled_rows.push_back(std::move(row));
  }
  const auto k = static_cast<Eigen::Index>(system.residual.size());
  dual.matrix = IntMatrix::Zero(k, static_cast<Eigen::Index>(dual.classes.size()));
  for (std::size_t x = 0; x < dual.classes.size(); ++x) {
    const auto& rep = dual.scaled_rows[dual.classes[x].front()];
    for (Eigen::Index c = 0; c < k; ++c) {
      dual.matrix(c, static_cast<Eigen::Index>(x)) = numerator(rep.a_coef(c)).convert_to<std::int64_t>();
    }
  }
  return dual;
}

RegionDescription::RegionDescription(int users, std::vector<RegionInequality> inequalities)
    : users_(users), inequalities_(std::move(inequalities)) {
  for (const auto& q : inequalities_) {
    if (q.coef.size() != users_) throw InvalidArgument("region inequality has the wrong length");
  }
}

bool RegionDescription::contains(const VectorQ& w) const {
  if (w.size() != users_) throw InvalidArgument("point has the wrong dimension");
  return std::all_of(inequalities_.begin(), inequalities_.end(),
                     [&](const RegionInequality& q) { return q.coef.dot(w) >= q.rhs; });
}

void RegionDescription::serialize(std::ostream& out) const {
  for (const auto& q : inequalities_) {
    for (Eigen::Index i = 0; i < q.coef.size(); ++i) out << to_string(q.coef(i)) << ' ';
    out << ">= " << to_string(q.rhs) << '\n';
  }
}

RegionDescription RegionDescription::parse(std::istream& in) {
  std::vector<RegionInequality> rows;
  std::string line;
  int users = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream is(line);
    std::vector<std::string> tokens;
    for (std::string tok; is >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() < 3 || tokens[tokens.size() - 2] != ">=") {
      throw InvalidArgument("region line " + std::to_string(line_no) + ": expected 'c_1 ... c_n >= c_0'");
    }
    const int n = static_cast<int>(tokens.size()) - 2;
    if (users >= 0 && n != users) throw InvalidArgument("region line " + std::to_string(line_no) + ": wrong length");
    users = n;
    RegionInequality q{VectorQ(n), parse_rational(tokens.back())};
    for (int i = 0; i < n; ++i) q.coef(i) = parse_rational(tokens[static_cast<std::size_t>(i)]);
    rows.push_back(std::move(q));
  }
  return RegionDescription(std::max(users, 0), std::move(rows));
}

namespace {

std::string expression(const VectorQ& coef) {
  std::string out;
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    const Rational& c = coef(i);
    if (c == 0) continue;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    const Rational mag = abs(c);
    if (mag != 1) out += to_string(mag) + " ";
    out += "w" + std::to_string(i + 1);
  }
  return out.empty() ? "0" : out;
}

bool leading_negative(const VectorQ& coef) {
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    if (coef(i) != 0) return coef(i) < 0;
  }
  return false;
}

}  // namespace

std::string pretty(const RegionInequality& q) {
  if (leading_negative(q.coef)) return expression(VectorQ(-q.coef)) + " <= " + to_string(Rational(-q.rhs));
  return expression(q.coef) + " >= " + to_string(q.rhs);
}

std::vector<std::string> RegionDescription::pretty() const {
  std::vector<std::string> lines;
  std::vector<bool> used(inequalities_.size(), false);
  for (std::size_t i = 0; i < inequalities_.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const auto& q = inequalities_[i];
    std::optional<std::size_t> partner;
    for (std::size_t j = i + 1; j < inequalities_.size(); ++j) {
      if (!used[j] && inequalities_[j].coef == VectorQ(-q.coef)) {
        partner = j;
        break;
      }
    }
    if (!partner) {
      lines.push_back(noma::pretty(q));
      continue;
    }
    used[*partner] = true;
    const auto& p = inequalities_[*partner];
    const RegionInequality& lower = leading_negative(q.coef) ? p : q;  // lower.coef . w >= lower.rhs
    const RegionInequality& upper = leading_negative(q.coef) ? q : p;
    lines.push_back(to_string(lower.rhs) + " <= " + expression(lower.coef) + " <= " + to_string(Rational(-upper.rhs)));
  }
  return lines;
}

RegionDescription region_inequalities(const std::vector<IntVector>& basis, const DualSystem& dual,
                                      const EliminatedSystem& system) {
  const int n = system.users;
  std::vector<RegionInequality> out;
  std::set<std::string> seen;
  auto add = [&](const VectorQ& coef, const Rational& rhs) {
    auto q = normalize(coef, rhs);
    if (!q) return;
    if (seen.insert(key_of(q->coef) + "| " + to_string(q->rhs)).second) out.push_back(std::move(*q));
  };
  for (int i = 0; i < n; ++i) {
    VectorQ e = VectorQ::Zero(n);
    e(i) = 1;
    add(e, Rational(0));
    add(VectorQ(-e), Rational(-1));
  }
  for (const auto& row : system.direct) add(row.w_coef, Rational(-row.constant));

  for (const auto& b : basis) {
    if (b.size() != static_cast<Eigen::Index>(dual.classes.size())) {
      throw InvalidArgument("basis element does not match the dual system");
    }
    std::vector<std::size_t> active;
    for (Eigen::Index x = 0; x < b.size(); ++x) {
      if (b(x) > 0) active.push_back(static_cast<std::size_t>(x));
    }
    // Every choice of one representative row per merged class.
    std::vector<std::size_t> choice(active.size(), 0);
    for (;;) {
      VectorQ w = VectorQ::Zero(n);
      VectorQ a = VectorQ::Zero(static_cast<Eigen::Index>(system.residual.size()));
      Rational constant = 0;
      for (std::size_t s = 0; s < active.size(); ++s) {
        const std::size_t x = active[s];
        const auto& row = dual.scaled_rows[dual.classes[x][choice[s]]];
        const Rational weight(b(static_cast<Eigen::Index>(x)));
        w += row.w_coef * weight;
        a += row.a_coef * weight;
        constant += row.constant * weight;
      }
      if (!a.isZero()) throw InternalError("residual variables do not cancel for a basis element");
      add(w, Rational(-constant));
      std::size_t s = 0;
      while (s < active.size() && ++choice[s] == dual.classes[active[s]].size()) choice[s++] = 0;
      if (s == active.size()) break;
    }
  }
  return RegionDescription(n, std::move(out));
}

RegionPipeline feasible_region(const VirtualUserFamily& family, const HilbertOptions& options) {
  RegionPipeline p;
  p.system = eliminate_equalities(family);
  p.dual = dual_system(p.system);
  if (p.dual.matrix.cols() > 0) p.basis = hilbert_basis(p.dual.matrix, options);
  p.region = region_inequalities(p.basis, p.dual, p.system);
  return p;
}

std::vector<RegionInequality> violated_by_box(const RegionDescription& region, const ExactDemands& demands) {
  std::vector<RegionInequality> out;
  for (const auto& q : region.inequalities()) {
    Rational best = 0;
    for (Eigen::Index i = 0; i < q.coef.size(); ++i) {
      best += q.coef(i) * (q.coef(i) > 0 ? demands.upper(i) : demands.lower(i));
    }
    if (best < q.rhs) out.push_back(q);
  }
  return out;
}

}  // namespace noma
