#include "latlab/instance.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "latlab/basis.hpp"
#include "latlab/error.hpp"
#include "latlab/lattice_core.hpp"
#include "latlab/prng.hpp"
#include "latlab/solvers.hpp"

namespace latlab {

namespace {

/* Seeded unimodular scramble: repeated elementary row operations
 * row_i += c * row_j with c in {-2,-1,1,2}. The lattice is unchanged, only
 * its presentation, so every planted optimum survives scrambling. */
RatMat scramble_rows(const RatMat& basis, uint64_t seed) {
  size_t n = basis.size();
  if (n < 2) return basis;
  SplitMix64 g(mix64(seed, 0x5c5abb1eull));
  IntMat u = identity_int(n);
  for (size_t round = 0; round < 3; ++round) {
    for (size_t op = 0; op < n * n; ++op) {
      size_t i = static_cast<size_t>(uniform_below(g, n));
      size_t j = static_cast<size_t>(uniform_below(g, n - 1));
      if (j >= i) ++j;
      long c = static_cast<long>(uniform_below(g, 4));  // 0..3
      c = (c < 2) ? c - 2 : c - 1;                      // -2,-1,1,2
      for (size_t col = 0; col < n; ++col) u[i][col] += c * u[j][col];
    }
  }
  return apply_transform(u, basis);
}

RatMat diagonal_rows(const std::vector<long>& entries) {
  size_t n = entries.size();
  RatMat rows(n, RatVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) rows[i][i] = Rat(Int(entries[i]));
  return rows;
}

/* Small seeded diagonal entries in [lo, hi]. For rank >= 6 the minimum is
 * copied to a second position so the shortest vector comes in at least two
 * +- pairs (the randomized reductions' per-seed success rates rely on the
 * multiplicity; a unique pair would make 10-seed schedules flaky). */
std::vector<long> seeded_diagonal(SplitMix64& g, int rank, long lo, long hi) {
  std::vector<long> d(static_cast<size_t>(rank));
  for (auto& e : d) e = lo + static_cast<long>(uniform_below(g, static_cast<uint64_t>(hi - lo + 1)));
  if (rank >= 6) {
    size_t argmin = 0;
    for (size_t i = 1; i < d.size(); ++i)
      if (d[i] < d[argmin]) argmin = i;
    size_t copy = static_cast<size_t>(uniform_below(g, static_cast<uint64_t>(rank - 1)));
    if (copy >= argmin) ++copy;
    d[copy] = d[argmin];
  }
  return d;
}

/* Joint lattice point + nearby offset used to synthesize targets. The
 * offset entries are num/den with |num| <= 1 and den in {2,3,4}; when
 * shrink_below_sq is positive the offset is halved until its squared length
 * is strictly below that bound (the planted-close uniqueness condition). */
RatVec nearby_target(const RatMat& basis, SplitMix64& g, const Rat& shrink_below_sq) {
  size_t n = basis.size();
  size_t m = basis[0].size();
  RatVec t(m, Rat(0));
  for (size_t i = 0; i < n; ++i) {
    long coeff = static_cast<long>(uniform_below(g, 5)) - 2;  // -2..2
    if (coeff == 0) continue;
    for (size_t col = 0; col < m; ++col) t[col] += Rat(Int(coeff)) * basis[i][col];
  }
  RatVec delta(m, Rat(0));
  for (size_t col = 0; col < m; ++col) {
    long num = static_cast<long>(uniform_below(g, 3)) - 1;  // -1..1
    long den = 2 + static_cast<long>(uniform_below(g, 3));  // 2..4
    delta[col] = make_rat(Int(num), Int(den));
  }
  if (is_zero_vec(delta)) delta[0] = make_rat(Int(1), Int(3));
  if (shrink_below_sq > Rat(0)) {
    while (!(norm_sq(delta) < shrink_below_sq))
      delta = vec_scale(delta, make_rat(Int(1), Int(2)));
  }
  return vec_add(t, delta);
}

RatMat gen_unimodular_scramble(int rank, uint64_t seed) {
  RatMat eye(static_cast<size_t>(rank), RatVec(static_cast<size_t>(rank), Rat(0)));
  for (int i = 0; i < rank; ++i) eye[static_cast<size_t>(i)][static_cast<size_t>(i)] = Rat(1);
  return scramble_rows(eye, mix64(seed, 1));
}

/* Two disjoint-support sign vectors of weight w (one for rank < 4) among
 * stretched axes: lambda_1^2 = w, achieved by exactly the planted vectors.
 * Axis scales are >= 3, so no combination involving them competes. */
RatMat gen_planted_short(int rank, uint64_t seed) {
  size_t n = static_cast<size_t>(rank);
  SplitMix64 g(mix64(seed, 2));
  size_t w = 2;
  if (rank >= 6 && uniform_below(g, 2) == 1) w = 3;
  size_t planted = (n >= 2 * w) ? 2 : 1;
  if (rank < 4) {
    w = std::min<size_t>(2, n);
    planted = (w == 2) ? 1 : 0;
  }
  RatMat rows;
  std::vector<bool> pivot_used(n, false);
  for (size_t v = 0; v < planted; ++v) {
    RatVec row(n, Rat(0));
    row[v * w] = Rat(1);  // canonical leading sign
    pivot_used[v * w] = true;
    for (size_t k = 1; k < w; ++k)
      row[v * w + k] = (uniform_below(g, 2) == 0) ? Rat(1) : Rat(-1);
    rows.push_back(row);
  }
  for (size_t col = 0; col < n; ++col) {
    if (pivot_used[col]) continue;
    RatVec row(n, Rat(0));
    long scale = 3 + static_cast<long>(uniform_below(g, 3));  // 3..5
    row[col] = Rat(Int(scale));
    rows.push_back(row);
  }
  return scramble_rows(rows, mix64(seed, 3));
}

RatMat gen_planted_close_basis(int rank, uint64_t seed, SplitMix64& g) {
  std::vector<long> d = seeded_diagonal(g, rank, 2, 5);
  return scramble_rows(diagonal_rows(d), mix64(seed, 4));
}

/* Modular-relation lattice {x : sum w_i x_i = 0 mod K}. Weight collisions
 * w_1 = w_2 (and w_3 = w_4 for rank >= 4) plant +-(e_i - e_j) relations, so
 * lambda_1^2 = 2 with multiplicity at least two pairs at rank >= 4 (norm-1
 * members would need some w_i divisible by K, which the range forbids). */
RatMat gen_knapsack(int rank, uint64_t seed) {
  size_t n = static_cast<size_t>(rank);
  SplitMix64 g(mix64(seed, 5));
  Int K(static_cast<long>(51 + uniform_below(g, 150)));
  std::vector<Int> w(n);
  for (auto& wi : w) {
    do {
      wi = Int(static_cast<long>(1 + uniform_below(g, 49)));
    } while (gcd(wi, K) != 1);
  }
  if (n >= 2) w[1] = w[0];
  if (n >= 4) w[3] = w[2];
  Int inv;
  mpz_invert(inv.get_mpz_t(), w[0].get_mpz_t(), K.get_mpz_t());
  RatMat rows(n, RatVec(n, Rat(0)));
  rows[0][0] = Rat(K);
  for (size_t i = 1; i < n; ++i) {
    Int c = (w[i] * inv) % K;
    if (c < 0) c += K;
    rows[i][i] = Rat(1);
    rows[i][0] = Rat(Int(-c));
  }
  return scramble_rows(rows, mix64(seed, 6));
}

Int shortest_pair_count(const RatMat& basis) {
  LatticePoint sv = svp_exact(basis);
  return count_primitive(basis, sv.norm_sq).count;
}

constexpr int kRankCap = 12;

}  // namespace

const std::vector<std::string>& instance_kinds() {
  static const std::vector<std::string> kinds = {
      "unimodular-scramble", "planted-short", "planted-close", "diagonal", "knapsack"};
  return kinds;
}

std::string instance_file_name(const std::string& kind, int rank, uint64_t seed) {
  std::ostringstream os;
  os << kind << "_r" << rank << "_s" << seed << ".txt";
  return os.str();
}

Instance generate_instance(const std::string& kind, int rank, uint64_t seed) {
  const auto& kinds = instance_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw InvalidParameterError("unknown instance kind: " + kind);
  if (rank < 1) throw InvalidParameterError("instance rank must be positive");
  if (rank > kRankCap)
    throw CapExceededError("instance rank above the cap of " + std::to_string(kRankCap));

  /* Deterministic attempt loop: almost every construction meets the
   * multiplicity contract on its first try, but the guarantee lives here,
   * not in luck. Each retry reseeds the whole construction. */
  for (uint64_t attempt = 0;; ++attempt) {
    uint64_t s = mix64(seed, attempt, 0x1a57a9ceull);
    Instance inst;
    SplitMix64 tg(mix64(s, 0x7a26e7ull));
    if (kind == "unimodular-scramble") {
      inst.basis = gen_unimodular_scramble(rank, s);
      inst.target = nearby_target(inst.basis, tg, Rat(0));
    } else if (kind == "planted-short") {
      inst.basis = gen_planted_short(rank, s);
      inst.target = nearby_target(inst.basis, tg, Rat(0));
    } else if (kind == "planted-close") {
      inst.basis = gen_planted_close_basis(rank, s, tg);
      Rat l1_sq = svp_exact(inst.basis).norm_sq;
      inst.target = nearby_target(inst.basis, tg, l1_sq / Rat(4));
    } else if (kind == "diagonal") {
      std::vector<long> d = seeded_diagonal(tg, rank, 1, 5);
      inst.basis = diagonal_rows(d);
      inst.target = nearby_target(inst.basis, tg, Rat(0));
    } else {  // knapsack
      inst.basis = gen_knapsack(rank, s);
      inst.target = nearby_target(inst.basis, tg, Rat(0));
    }
    if (rank >= 6 && shortest_pair_count(inst.basis) < 2) continue;
    std::ostringstream meta;
    meta << "kind=" << kind << " rank=" << rank << " seed=" << seed;
    inst.comments = {"latlab corpus instance", meta.str()};
    return inst;
  }
}

std::string format_instance(const Instance& instance) {
  validate_shape(instance.basis);
  std::ostringstream os;
  for (const auto& c : instance.comments) os << "# " << c << "\n";
  size_t n = instance.basis.size();
  size_t m = instance.basis[0].size();
  os << n << " " << m << "\n";
  for (const auto& row : instance.basis) os << to_string(row) << "\n";
  if (instance.target) {
    if (instance.target->size() != m)
      throw InvalidParameterError("target dimension does not match the basis");
    os << "t: " << to_string(*instance.target) << "\n";
  }
  return os.str();
}

Instance parse_instance(const std::string& text) {
  Instance inst;
  std::istringstream in(text);
  std::string line;
  size_t n = 0, m = 0;
  size_t rows_read = 0;
  bool header_read = false;
  size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      size_t start = first + 1;
      if (start < line.size() && line[start] == ' ') ++start;
      std::string body = line.substr(start);
      while (!body.empty() && (body.back() == '\r' || body.back() == ' ')) body.pop_back();
      inst.comments.push_back(body);
      continue;
    }
    std::istringstream ls(line);
    if (!header_read) {
      long long ln = 0, lm = 0;
      std::string extra;
      if (!(ls >> ln >> lm) || (ls >> extra) || ln < 1 || lm < 1)
        fail("expected header \"rank ambient\"");
      n = static_cast<size_t>(ln);
      m = static_cast<size_t>(lm);
      if (m < n) fail("ambient dimension below the rank");
      header_read = true;
      continue;
    }
    std::string tok;
    ls >> tok;
    if (tok == "t:") {
      if (rows_read < n) fail("target row before the basis is complete");
      if (inst.target) fail("duplicate target row");
      RatVec t;
      while (ls >> tok) t.push_back(parse_rat(tok));
      if (t.size() != m) fail("target needs " + std::to_string(m) + " entries");
      inst.target = std::move(t);
      continue;
    }
    if (rows_read >= n) fail("unexpected extra row");
    RatVec row;
    row.push_back(parse_rat(tok));
    while (ls >> tok) row.push_back(parse_rat(tok));
    if (row.size() != m) fail("basis row needs " + std::to_string(m) + " entries");
    inst.basis.push_back(std::move(row));
    ++rows_read;
  }
  if (!header_read) throw ParseError("missing header line");
  if (rows_read != n)
    throw ParseError("expected " + std::to_string(n) + " basis rows, got " +
                     std::to_string(rows_read));
  validate_shape(inst.basis);
  gram_schmidt(inst.basis);  // rejects dependent rows loudly
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void store_instance(const Instance& instance, const std::string& path) {
  std::string text = format_instance(instance);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("short write to " + path);
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) throw ParseError("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<CorpusEntry> corpus;
  for (const auto& p : paths) {
    CorpusEntry e;
    e.id = fs::path(p).stem().string();
    e.instance = load_instance(p);
    corpus.push_back(std::move(e));
  }
  return corpus;
}

}  // namespace latlab
