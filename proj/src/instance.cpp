#include "noma/source.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace noma {

UniformSource::UniformSource(VirtualUserFamily family, Eigen::VectorXd low, Eigen::VectorXd high)
    : family_(std::move(family)), low_(std::move(low)), high_(std::move(high)) {
  if (static_cast<std::size_t>(low_.size()) != family_.size() || low_.size() != high_.size()) {
    throw InvalidArgument("uniform source ranges must match the family size");
  }
  if ((high_.array() < low_.array()).any()) throw InvalidArgument("uniform source range with high < low");
  bound_ = std::max(low_.cwiseAbs().maxCoeff(), high_.cwiseAbs().maxCoeff());
}

PerformanceSample UniformSource::draw(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PerformanceSample s{Eigen::VectorXd(low_.size()), bound_};
  for (Eigen::Index j = 0; j < low_.size(); ++j) s.values(j) = low_(j) + (high_(j) - low_(j)) * unit(rng);
  return s;
}

FiniteSupportInstance::FiniteSupportInstance(VirtualUserFamily family, std::vector<std::vector<Atom>> marginals)
    : family_(std::move(family)), marginals_(std::move(marginals)) {
  validate();
}

FiniteSupportInstance::FiniteSupportInstance(VirtualUserFamily family, std::vector<JointOutcome> joint)
    : family_(std::move(family)), joint_(std::move(joint)) {
  if (joint_.empty()) throw InvalidArgument("joint table is empty");
  validate();
}

void FiniteSupportInstance::validate() const {
  if (independent()) {
    if (marginals_.size() != family_.size()) throw InvalidArgument("one marginal per virtual user required");
    for (std::size_t j = 0; j < marginals_.size(); ++j) {
      if (marginals_[j].empty()) throw InvalidArgument("empty support for " + family_[j].to_string());
      Rational total = 0;
      for (const auto& a : marginals_[j]) {
        if (a.probability < 0) throw InvalidArgument("negative probability in " + family_[j].to_string());
        total += a.probability;
      }
      if (total != 1) {
        throw InvalidArgument("probabilities of " + family_[j].to_string() + " sum to " + to_string(total));
      }
    }
  } else {
    Rational total = 0;
    for (const auto& o : joint_) {
      if (static_cast<std::size_t>(o.values.size()) != family_.size()) {
        throw InvalidArgument("joint outcome has wrong length");
      }
      if (o.probability < 0) throw InvalidArgument("negative joint probability");
      total += o.probability;
    }
    if (total != 1) throw InvalidArgument("joint probabilities sum to " + to_string(total));
  }
}

std::size_t FiniteSupportInstance::outcome_count() const {
  if (!independent()) return joint_.size();
  std::size_t count = 1;
  for (const auto& m : marginals_) {
    if (count > std::numeric_limits<std::size_t>::max() / m.size()) return std::numeric_limits<std::size_t>::max();
    count *= m.size();
  }
  return count;
}

std::vector<JointOutcome> FiniteSupportInstance::outcomes(std::size_t cap) const {
  std::size_t count = outcome_count();
  if (count > cap) {
    throw ResourceLimitError("instance has " + std::to_string(count) + " joint outcomes, cap is " +
                             std::to_string(cap));
  }
  if (!independent()) return joint_;

  std::vector<JointOutcome> out;
  out.reserve(count);
  const std::size_t m = marginals_.size();
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    JointOutcome o{VectorQ(static_cast<Eigen::Index>(m)), Rational(1)};
    for (std::size_t j = 0; j < m; ++j) {
      const auto& a = marginals_[j][idx[j]];
      o.values(static_cast<Eigen::Index>(j)) = a.value;
      o.probability *= a.probability;
    }
    out.push_back(std::move(o));
    // odometer, first member varies slowest
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < marginals_[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (m == 0) return out;
  }
}

VectorQ FiniteSupportInstance::mean() const {
  VectorQ mu = VectorQ::Constant(static_cast<Eigen::Index>(family_.size()), Rational(0));
  if (independent()) {
    for (std::size_t j = 0; j < marginals_.size(); ++j) {
      for (const auto& a : marginals_[j]) mu(static_cast<Eigen::Index>(j)) += a.value * a.probability;
    }
  } else {
    for (const auto& o : joint_) mu += o.values * o.probability;
  }
  return mu;
}

double FiniteSupportInstance::bound() const {
  double b = 0;
  if (independent()) {
    for (const auto& m : marginals_) {
      for (const auto& a : m) b = std::max(b, std::abs(to_double(a.value)));
    }
  } else {
    for (const auto& o : joint_) {
      for (Eigen::Index j = 0; j < o.values.size(); ++j) b = std::max(b, std::abs(to_double(o.values(j))));
    }
  }
  return b;
}

template <typename Scalar>
DiscreteSource<Scalar>::DiscreteSource(const FiniteSupportInstance& instance)
    : family_(instance.family()), independent_(instance.independent()), bound_(instance.bound()) {
  auto build = [](const std::vector<Rational>& probs, std::vector<Vec<Scalar>> values) {
    Table t;
    Rational acc = 0;
    for (const auto& p : probs) {
      acc += p;
      t.cumulative.push_back(to_double(acc));
    }
    t.values = std::move(values);
    return t;
  };
  if (independent_) {
    for (const auto& marginal : instance.marginals()) {
      std::vector<Rational> probs;
      std::vector<Vec<Scalar>> values;
      for (const auto& a : marginal) {
        probs.push_back(a.probability);
        Vec<Scalar> v(1);
        v(0) = scalar_cast<Scalar>(a.value);
        values.push_back(std::move(v));
      }
      tables_.push_back(build(probs, std::move(values)));
    }
  } else {
    std::vector<Rational> probs;
    std::vector<Vec<Scalar>> values;
    for (const auto& o : instance.outcomes()) {
      probs.push_back(o.probability);
      Vec<Scalar> v(o.values.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = scalar_cast<Scalar>(o.values(j));
      values.push_back(std::move(v));
    }
    tables_.push_back(build(probs, std::move(values)));
  }
}

template <typename Scalar>
std::size_t DiscreteSource<Scalar>::pick(const Table& t, Rng& rng) const {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t k = 0; k < t.cumulative.size(); ++k) {
    if (u < t.cumulative[k]) return k;
  }
  return t.cumulative.size() - 1;
}

template <typename Scalar>
BasicPerformanceSample<Scalar> DiscreteSource<Scalar>::draw(Rng& rng) {
  BasicPerformanceSample<Scalar> s{Vec<Scalar>(static_cast<Eigen::Index>(family_.size())), bound_};
  if (independent_) {
    for (std::size_t j = 0; j < tables_.size(); ++j) {
      s.values(static_cast<Eigen::Index>(j)) = tables_[j].values[pick(tables_[j], rng)](0);
    }
  } else {
    s.values = tables_.front().values[pick(tables_.front(), rng)];
  }
  return s;
}

template class DiscreteSource<double>;
template class DiscreteSource<Rational>;

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw InvalidArgument("instance line " + std::to_string(line_no) + ": " + what);
}

VectorQ parse_vector(const std::vector<std::string>& toks, std::size_t from, int line_no) {
  VectorQ v(static_cast<Eigen::Index>(toks.size() - from));
  for (std::size_t k = from; k < toks.size(); ++k) {
    try {
      v(static_cast<Eigen::Index>(k - from)) = parse_rational(toks[k]);
    } catch (const std::invalid_argument& e) {
      fail(line_no, e.what());
    }
  }
  return v;
}

}  // namespace

InstanceFile read_instance(std::istream& in) {
  int users = 0;
  std::optional<int> n_max;
  std::optional<std::vector<VirtualUser>> explicit_family;
  std::vector<std::pair<VirtualUser, std::vector<Atom>>> blocks;
  std::vector<std::pair<Rational, VectorQ>> joint_rows;
  std::optional<VectorQ> lower, upper;
  enum class Section { Header, Member, Joint, Demands } section = Section::Header;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto toks = tokens(line);
    if (toks.empty()) continue;
    const std::string& key = toks.front();
    try {
      if (key == "users") {
        if (toks.size() != 2) fail(line_no, "users takes one value");
        users = std::stoi(toks[1]);
      } else if (key == "nmax") {
        if (toks.size() != 2) fail(line_no, "nmax takes one value");
        n_max = std::stoi(toks[1]);
      } else if (key == "family") {
        std::vector<VirtualUser> members;
        for (std::size_t k = 1; k < toks.size(); ++k) members.push_back(VirtualUser::parse(toks[k]));
        explicit_family = std::move(members);
      } else if (key == "member") {
        if (toks.size() != 2) fail(line_no, "member takes one virtual user");
        blocks.emplace_back(VirtualUser::parse(toks[1]), std::vector<Atom>{});
        section = Section::Member;
      } else if (key == "joint") {
        section = Section::Joint;
      } else if (key == "demands") {
        section = Section::Demands;
      } else if (section == Section::Demands && (key == "lower" || key == "upper")) {
        (key == "lower" ? lower : upper) = parse_vector(toks, 1, line_no);
      } else if (section == Section::Member) {
        if (toks.size() != 2) fail(line_no, "expected 'value probability'");
        blocks.back().second.push_back(Atom{parse_rational(toks[0]), parse_rational(toks[1])});
      } else if (section == Section::Joint) {
        VectorQ row = parse_vector(toks, 0, line_no);
        joint_rows.emplace_back(row(0), row.tail(row.size() - 1));
      } else {
        fail(line_no, "unexpected '" + key + "'");
      }
    } catch (const InvalidArgument&) {
      throw;
    } catch (const std::exception& e) {
      fail(line_no, e.what());
    }
  }

  if (users < 1) throw InvalidArgument("instance must declare 'users'");
  VirtualUserFamily family = explicit_family ? VirtualUserFamily(users, *explicit_family, n_max)
                                             : enumerate_virtual_users(users, n_max.value_or(users));

  std::optional<FiniteSupportInstance> instance;
  if (!joint_rows.empty()) {
    if (!blocks.empty()) throw InvalidArgument("instance mixes member blocks and a joint table");
    std::vector<JointOutcome> joint;
    for (auto& [p, v] : joint_rows) joint.push_back(JointOutcome{std::move(v), std::move(p)});
    instance.emplace(family, std::move(joint));
  } else {
    std::vector<std::vector<Atom>> marginals(family.size());
    std::vector<bool> seen(family.size(), false);
    for (auto& [v, atoms] : blocks) {
      auto j = family.index_of(v);
      if (!j) throw InvalidArgument("member " + v.to_string() + " is not in the family");
      if (seen[*j]) throw InvalidArgument("member " + v.to_string() + " listed twice");
      seen[*j] = true;
      marginals[*j] = std::move(atoms);
    }
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (!seen[j]) throw InvalidArgument("no support given for " + family[j].to_string());
    }
    instance.emplace(family, std::move(marginals));
  }

  InstanceFile file{std::move(*instance), std::nullopt};
  if (lower || upper) {
    ExactDemands d;
    d.lower = lower ? *lower : VectorQ::Constant(users, Rational(0));
    d.upper = upper ? *upper : VectorQ::Constant(users, Rational(1));
    if (d.lower.size() != users || d.upper.size() != users) {
      throw InvalidArgument("demand vectors must have one entry per user");
    }
    d.validate();
    file.demands = std::move(d);
  }
  return file;
}

InstanceFile read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open instance file '" + path + "'");
  return read_instance(in);
}

void write_instance(std::ostream& out, const InstanceFile& file) {
  const auto& family = file.instance.family();
  out << "users " << family.users() << "\n";
  out << "family";
  for (const auto& v : family) out << " " << v.to_string();
  out << "\n";
  if (file.instance.independent()) {
    for (std::size_t j = 0; j < family.size(); ++j) {
      out << "member " << family[j].to_string() << "\n";
      for (const auto& a : file.instance.marginals()[j]) {
        out << to_string(a.value) << " " << to_string(a.probability) << "\n";
      }
    }
  } else {
    out << "joint\n";
    for (const auto& o : file.instance.outcomes()) {
      out << to_string(o.probability);
      for (Eigen::Index j = 0; j < o.values.size(); ++j) out << " " << to_string(o.values(j));
      out << "\n";
    }
  }
  if (file.demands) {
    out << "demands\nlower";
    for (Eigen::Index i = 0; i < file.demands->lower.size(); ++i) out << " " << to_string(file.demands->lower(i));
    out << "\nupper";
    for (Eigen::Index i = 0; i < file.demands->upper.size(); ++i) out << " " << to_string(file.demands->upper(i));
    out << "\n";
  }
}

}  // namespace noma
