#include "owa/qlearn.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace owa {

namespace {
std::string cell_key(const std::string& obs_key, const std::string& goal_key) {
  return obs_key + "|" + goal_key;
}
}  // namespace

const std::vector<double>& QTable::zero_row(int n) {
  static std::map<int, std::vector<double>> zeros;
  auto it = zeros.find(n);
  if (it == zeros.end()) it = zeros.emplace(n, std::vector<double>(n, 0.0)).first;
  return it->second;
}

const std::vector<double>& QTable::row(const std::string& obs_key,
                                       const std::string& goal_key) const {
  auto it = table_.find(cell_key(obs_key, goal_key));
  if (it == table_.end()) return zero_row(n_actions_);
  return it->second;
}

std::vector<double>& QTable::mutable_row(const std::string& obs_key,
                                         const std::string& goal_key) {
  auto [it, inserted] =
      table_.try_emplace(cell_key(obs_key, goal_key), n_actions_, 0.0);
  return it->second;
}

int QTable::greedy(const std::string& obs_key, const std::string& goal_key) const {
  const auto& r = row(obs_key, goal_key);
  int best = 0;
  for (int a = 1; a < n_actions_; ++a)
    if (r[a] > r[best]) best = a;
  return best;
}

int QTable::greedy_masked(const std::string& obs_key, const std::string& goal_key,
                          const std::vector<bool>& allowed) const {
  const auto& r = row(obs_key, goal_key);
  int best = -1;
  for (int a = 0; a < n_actions_ && a < static_cast<int>(allowed.size()); ++a) {
    if (!allowed[a]) continue;
    if (best < 0 || r[a] > r[best]) best = a;
  }
  return best < 0 ? 0 : best;
}

double QTable::max_value(const std::string& obs_key,
                         const std::string& goal_key) const {
  const auto& r = row(obs_key, goal_key);
  return *std::max_element(r.begin(), r.end());
}

namespace {
constexpr char kMagic[8] = {'O', 'W', 'A', 'P', 'O', 'L', '0', '1'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
uint32_t get_u32(const std::vector<uint8_t>& in, size_t& pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in.at(pos++)) << (8 * i);
  return v;
}
void put_f64(std::vector<uint8_t>& out, double d) {
  uint64_t v;
  std::memcpy(&v, &d, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
double get_f64(const std::vector<uint8_t>& in, size_t& pos) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in.at(pos++)) << (8 * i);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}
}  // namespace

std::vector<uint8_t> QTable::serialize() const {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 8);
  put_u32(out, static_cast<uint32_t>(n_actions_));
  put_u32(out, static_cast<uint32_t>(table_.size()));
  for (const auto& [key, values] : table_) {  // std::map: sorted keys
    put_u32(out, static_cast<uint32_t>(key.size()));
    out.insert(out.end(), key.begin(), key.end());
    for (double v : values) put_f64(out, v);
  }
  return out;
}

QTable QTable::deserialize(const std::vector<uint8_t>& bytes) {
  size_t pos = 0;
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw std::runtime_error("bad policy artifact magic");
  pos = 8;
  uint32_t n_actions = get_u32(bytes, pos);
  uint32_t rows = get_u32(bytes, pos);
  QTable q(static_cast<int>(n_actions));
  for (uint32_t r = 0; r < rows; ++r) {
    uint32_t klen = get_u32(bytes, pos);
    std::string key(bytes.begin() + pos, bytes.begin() + pos + klen);
    pos += klen;
    std::vector<double> values(n_actions);
    for (auto& v : values) v = get_f64(bytes, pos);
    q.table_[key] = std::move(values);
  }
  return q;
}

void QTable::save(const std::string& path) const {
  auto bytes = serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

QTable QTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

void q_update(QTable& q, const ObsKeyFn& obs_key, const Transition& t,
              double gamma, double alpha) {
  std::string gk = t.goal.key();
  double bootstrap =
      t.done ? 0.0 : q.max_value(obs_key(t.next_obs), gk);
  auto& row = q.mutable_row(obs_key(t.obs), gk);
  double target = t.reward + gamma * bootstrap;
  row[t.action] += alpha * (target - row[t.action]);
}

namespace {

// Achieved goal at an observation, restricted to the goal space predicates.
SymbolicGoal achieved_goal(const Detector& detector, const Observation& obs,
                           const std::set<std::string>& goal_predicates) {
  SymbolicGoal g;
  for (const auto& a : detector.detect(obs).atoms)
    if (goal_predicates.count(a.predicate)) g.atoms.insert(a);
  return g;
}

}  // namespace

std::vector<Transition> her_relabel(const std::vector<Transition>& episode,
                                    const Detector& detector,
                                    HerStrategy strategy,
                                    const std::set<std::string>& goal_predicates,
                                    int k, Rng& rng) {
  std::vector<Transition> out = episode;
  if (episode.empty()) return out;

  auto relabel_with = [&](const Transition& t, const SymbolicGoal& g) {
    Transition r = t;
    r.goal = g;
    bool hit = g.satisfied_by(detector.detect(t.next_obs));
    r.reward = hit ? 1.0 : 0.0;
    r.done = hit;
    return r;
  };

  if (strategy == HerStrategy::Final) {
    SymbolicGoal g =
        achieved_goal(detector, episode.back().next_obs, goal_predicates);
    if (g.atoms.empty()) return out;
    for (const auto& t : episode) out.push_back(relabel_with(t, g));
  } else {
    for (size_t i = 0; i < episode.size(); ++i) {
      for (int j = 0; j < k; ++j) {
        size_t future = i + rng.uniform_int(episode.size() - i);
        SymbolicGoal g =
            achieved_goal(detector, episode[future].next_obs, goal_predicates);
        if (g.atoms.empty()) continue;
        out.push_back(relabel_with(episode[i], g));
      }
    }
  }
  return out;
}

}  // namespace owa
