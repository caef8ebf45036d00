#include "noma/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <set>
#include <sstream>

namespace noma {

namespace {

std::string join_indices(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  return os.str();
}

}  // namespace

TieError::TieError(std::vector<std::size_t> tied)
    : std::runtime_error("scheduling measures tie among family members {" + join_indices(tied) + "}"),
      tied_(std::move(tied)) {}

VirtualUser::VirtualUser(std::vector<int> members) : members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("virtual user must have at least one member");
  std::sort(members_.begin(), members_.end());
  if (members_.front() < 1) throw InvalidArgument("user indices are 1-based");
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw InvalidArgument("virtual user " + to_string() + " has duplicate members");
  }
}

bool VirtualUser::contains(int user) const {
  return std::binary_search(members_.begin(), members_.end(), user);
}

std::string VirtualUser::to_string() const {
  std::string s = "{";
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(members_[k]);
  }
  return s + "}";
}

VirtualUser VirtualUser::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw InvalidArgument("virtual user must look like {1,3}: '" + std::string(text) + "'");
  }
  text = text.substr(1, text.size() - 2);
  std::vector<int> members;
  while (true) {
    auto comma = text.find(',');
    std::string_view item = trim(text.substr(0, comma));
    int value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidArgument("bad user index '" + std::string(item) + "'");
    }
    members.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return VirtualUser(std::move(members));
}

VirtualUserFamily::VirtualUserFamily(int users, std::vector<VirtualUser> members, std::optional<int> n_max)
    : users_(users), members_(std::move(members)), n_max_(n_max) {
  if (users_ < 1) throw InvalidArgument("family needs at least one user");
  if (members_.empty()) throw InvalidArgument("family needs at least one virtual user");
  std::set<VirtualUser> seen;
  std::vector<bool> covered(static_cast<std::size_t>(users_), false);
  for (const auto& v : members_) {
    if (!seen.insert(v).second) throw InvalidArgument("duplicate virtual user " + v.to_string());
    for (int u : v.members()) {
      if (u > users_) throw InvalidArgument("virtual user " + v.to_string() + " names an unknown user");
      covered[static_cast<std::size_t>(u - 1)] = true;
    }
    if (n_max_ && static_cast<int>(v.size()) > *n_max_) {
      throw InvalidArgument("virtual user " + v.to_string() + " exceeds n_max");
    }
  }
  for (int u = 0; u < users_; ++u) {
    if (!covered[static_cast<std::size_t>(u)]) {
      throw InvalidArgument("user " + std::to_string(u + 1) + " belongs to no virtual user");
    }
  }
}

std::size_t VirtualUserFamily::max_member_size() const {
  std::size_t k = 0;
  for (const auto& v : members_) k = std::max(k, v.size());
  return k;
}

std::optional<std::size_t> VirtualUserFamily::index_of(const VirtualUser& v) const {
  auto it = std::find(members_.begin(), members_.end(), v);
  if (it == members_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

std::vector<std::size_t> VirtualUserFamily::singleton_indices() const {
  std::vector<std::size_t> out;
  for (int u = 1; u <= users_; ++u) {
    if (auto j = index_of(VirtualUser{u})) out.push_back(*j);
  }
  return out;
}

Eigen::MatrixXi VirtualUserFamily::incidence() const {
  Eigen::MatrixXi b = Eigen::MatrixXi::Zero(users_, static_cast<Eigen::Index>(members_.size()));
  for (std::size_t j = 0; j < members_.size(); ++j) {
    for (int u : members_[j].members()) b(u - 1, static_cast<Eigen::Index>(j)) = 1;
  }
  return b;
}

VirtualUserFamily VirtualUserFamily::subfamily(std::span<const std::size_t> indices) const {
  std::vector<VirtualUser> picked;
  picked.reserve(indices.size());
  for (auto j : indices) picked.push_back(members_.at(j));
  return VirtualUserFamily(users_, std::move(picked));
}

VirtualUserFamily enumerate_virtual_users(int n, int n_max) {
  if (n < 1) throw InvalidArgument("user count must be positive");
  if (n_max < 1 || n_max > n) {
    throw InvalidArgument("n_max must lie in [1, " + std::to_string(n) + "], got " + std::to_string(n_max));
  }
  std::vector<VirtualUser> members;
  for (int k = 1; k <= n_max; ++k) {
    // lexicographic k-combinations of 1..n
    std::vector<int> comb(static_cast<std::size_t>(k));
    std::iota(comb.begin(), comb.end(), 1);
    while (true) {
      members.emplace_back(comb);
      int pos = k - 1;
      while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == n - k + pos + 1) --pos;
      if (pos < 0) break;
      ++comb[static_cast<std::size_t>(pos)];
      for (int q = pos + 1; q < k; ++q) comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  return VirtualUserFamily(n, std::move(members), n_max);
}

ExactDemands to_exact(const TemporalDemands& demands) {
  return {to_rational(demands.lower), to_rational(demands.upper)};
}

void validate(const TieBreakRule& rule) {
  if (const auto* st = std::get_if<StochasticTieBreak>(&rule)) {
    for (const auto& [tied, w] : st->weights) {
      if (tied.size() != w.size()) throw InvalidArgument("tie distribution length differs from tied set");
      Rational total = 0;
      for (const auto& p : w) {
        if (p < 0) throw InvalidArgument("negative tie-breaking probability");
        total += p;
      }
      if (total != 1) throw InvalidArgument("tie-breaking probabilities must sum to 1");
    }
  }
}

std::vector<Rational> tie_distribution(const TieBreakRule& rule, const std::vector<std::size_t>& tied) {
  if (tied.size() == 1) return {Rational(1)};
  if (std::holds_alternative<ErrorOnTie>(rule)) throw TieError(tied);
  std::vector<Rational> p(tied.size(), Rational(0));
  if (std::holds_alternative<LowestIndex>(rule)) {
    p.front() = 1;
    return p;
  }
  const auto& st = std::get<StochasticTieBreak>(rule);
  if (auto it = st.weights.find(tied); it != st.weights.end()) return it->second;
  for (auto& x : p) x = Rational(1, static_cast<long>(tied.size()));
  return p;
}

std::size_t break_tie(const TieBreakRule& rule, const std::vector<std::size_t>& tied, Rng& rng) {
  if (tied.empty()) throw InvalidArgument("empty tied set");
  if (tied.size() == 1) return tied.front();
  if (std::holds_alternative<ErrorOnTie>(rule)) throw TieError(tied);
  if (std::holds_alternative<LowestIndex>(rule)) return tied.front();
  const auto& st = std::get<StochasticTieBreak>(rule);
  auto it = st.weights.find(tied);
  if (it == st.weights.end()) {
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    return tied[pick(rng)];
  }
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < tied.size(); ++k) {
    double p = to_double(it->second[k]);
    if (p > 0) last_positive = k;
    acc += p;
    if (u < acc) return tied[k];
  }
  return tied[last_positive];
}

}  // namespace noma
