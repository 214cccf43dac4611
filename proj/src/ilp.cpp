#include "isac/ilp.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void IlpInstance::validate() const {
  const Eigen::Index n = objective.size();
  if (n < 1) throw std::invalid_argument("IlpInstance: empty objective");
  if (!(amplitude > 0.0))
    throw std::invalid_argument("IlpInstance: amplitude must be positive");
  if (rows.rows() != rhs.size() || (rows.rows() > 0 && rows.cols() != n))
    throw std::invalid_argument("IlpInstance: row/rhs dimensions mismatch");
  if (has_continuous && continuous_coeff.size() != rows.rows())
    throw std::invalid_argument(
        "IlpInstance: continuous_coeff must have one entry per row");
}

LpProblem lp_relaxation(const IlpInstance& inst) {
  inst.validate();
  const Eigen::Index n = inst.objective.size();
  const Eigen::Index k = inst.rows.rows();
  const Eigen::Index total = n + (inst.has_continuous ? 1 : 0);

  LpProblem p;
  p.c = VecX::Zero(total);
  p.c.head(n) = inst.objective;
  p.lo = VecX::Constant(total, -inst.amplitude);
  p.hi = VecX::Constant(total, inst.amplitude);
  p.a.resize(k, total);
  if (k > 0) p.a.leftCols(n) = inst.rows;
  p.b = inst.rhs;

  if (inst.has_continuous) {
    p.c(n) = inst.continuous_obj;
    double big = 1.0;
    for (Eigen::Index r = 0; r < k; ++r) {
      p.a(r, n) = -inst.continuous_coeff(r);
      const double coeff = std::abs(inst.continuous_coeff(r));
      if (coeff > 1e-12) {
        const double reach =
            (inst.rows.row(r).cwiseAbs().sum() * inst.amplitude +
             std::abs(inst.rhs(r))) /
            coeff;
        big = std::max(big, reach + 1.0);
      }
    }
    p.lo(n) = -big;
    p.hi(n) = big;
  }
  return p;
}

IlpPointValue evaluate_point(const IlpInstance& inst, const VecX& x) {
  inst.validate();
  if (x.size() != inst.objective.size())
    throw std::invalid_argument("evaluate_point: wrong length");
  IlpPointValue out;
  const double tol =
      1e-9 * (1.0 + (inst.rhs.size() ? inst.rhs.cwiseAbs().maxCoeff() : 0.0));

  double lower = -kInf, upper = kInf;
  bool plain_ok = true;
  for (Eigen::Index r = 0; r < inst.rows.rows(); ++r) {
    const double ax = inst.rows.row(r).dot(x);
    const double coeff =
        inst.has_continuous ? inst.continuous_coeff(r) : 0.0;
    if (std::abs(coeff) <= 1e-12) {
      if (ax < inst.rhs(r) - tol) plain_ok = false;
    } else if (coeff > 0.0) {
      upper = std::min(upper, (ax - inst.rhs(r)) / coeff);
    } else {
      lower = std::max(lower, (ax - inst.rhs(r)) / coeff);
    }
  }

  if (!inst.has_continuous) {
    out.feasible = plain_ok;
    out.objective = inst.objective.dot(x);
    return out;
  }

  if (!plain_ok || lower > upper + tol) {
    out.feasible = false;
    return out;
  }
  double t = 0.0;
  if (inst.continuous_obj > 0.0) t = upper;
  else if (inst.continuous_obj < 0.0) t = lower;
  else t = std::min(std::max(0.0, lower), upper);
  if (!std::isfinite(t)) {
    out.feasible = false;  // unbounded scalar: instance is malformed for BnB
    return out;
  }
  out.feasible = true;
  out.continuous_value = t;
  out.objective = inst.objective.dot(x) + inst.continuous_obj * t;
  return out;
}

namespace {

struct Node {
  double bound = kInf;
  int depth = 0;
  std::int64_t seq = 0;
  std::vector<std::int8_t> fix;
};

struct NodeLess {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

}  // namespace

BnbResult solve_bnb(const IlpInstance& inst, const BnbOptions& opt) {
  inst.validate();
  const Eigen::Index n = inst.objective.size();
  const double c = inst.amplitude;
  const LpProblem base = lp_relaxation(inst);

  BnbResult res;
  bool have_incumbent = false;
  VecX best_x;
  double best_obj = -kInf;
  double best_cont = 0.0;

  auto offer = [&](const VecX& x) {
    const IlpPointValue val = evaluate_point(inst, x);
    if (!val.feasible) return;
    if (!have_incumbent || val.objective > best_obj) {
      have_incumbent = true;
      best_obj = val.objective;
      best_cont = val.continuous_value;
      best_x = x;
    }
  };

  if (opt.warm_start != nullptr && opt.warm_start->size() == n)
    offer(*opt.warm_start);

  std::priority_queue<Node, std::vector<Node>, NodeLess> queue;
  std::int64_t seq = 0;
  queue.push(Node{kInf, 0, seq++, std::vector<std::int8_t>(n, 0)});

  bool hit_limit = false;
  double remaining_bound = -kInf;

  while (!queue.empty()) {
    if (res.nodes >= opt.node_limit) {
      hit_limit = true;
      while (!queue.empty()) {
        remaining_bound = std::max(remaining_bound, queue.top().bound);
        queue.pop();
      }
      break;
    }
    Node node = queue.top();
    queue.pop();
    ++res.nodes;

    LpProblem p = base;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (node.fix[i] > 0) p.lo(i) = p.hi(i) = c;
      if (node.fix[i] < 0) p.lo(i) = p.hi(i) = -c;
    }
    const LpResult lp = solve_lp(p);
    if (lp.status == LpStatus::Infeasible) continue;
    const bool trusted = (lp.status == LpStatus::Optimal);
    const double bound = trusted ? lp.objective : kInf;
    if (have_incumbent && bound <= best_obj - 1e-9 * (1.0 + std::abs(bound)))
      continue;

    VecX rounded(n);
    Eigen::Index branch_i = -1;
    double branch_score = -1.0;
    bool integral = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = trusted ? lp.v(i) : 0.0;
      rounded(i) = node.fix[i] != 0 ? node.fix[i] * c
                                    : (v >= 0.0 ? c : -c);
      if (node.fix[i] != 0) continue;
      const double frac = c - std::abs(v);
      if (frac > 1e-7 * c) {
        integral = false;
        const double score = (1.0 + std::abs(inst.objective(i))) * frac;
        if (score > branch_score) {
          branch_score = score;
          branch_i = i;
        }
      }
    }
    offer(rounded);
    if (integral && trusted) continue;
    if (branch_i < 0) {
      // No fractional coordinate to split on (untrusted LP): take the first
      // unfixed one.
      for (Eigen::Index i = 0; i < n && branch_i < 0; ++i)
        if (node.fix[i] == 0) branch_i = i;
      if (branch_i < 0) continue;  // fully fixed leaf
    }

    for (int sgn : {+1, -1}) {
      Node child;
      child.bound = bound;
      child.depth = node.depth + 1;
      child.seq = seq++;
      child.fix = node.fix;
      child.fix[branch_i] = static_cast<std::int8_t>(sgn);
      queue.push(std::move(child));
    }
  }

  if (hit_limit) {
    res.status = BnbStatus::NodeLimit;
    res.best_bound = std::max(remaining_bound, best_obj);
    if (have_incumbent) {
      res.x = best_x;
      res.objective = best_obj;
      res.continuous_value = best_cont;
      res.gap = (res.best_bound - best_obj) / std::max(1.0, std::abs(best_obj));
    } else {
      res.gap = kInf;
    }
    return res;
  }

  if (have_incumbent) {
    res.status = BnbStatus::Optimal;
    res.x = best_x;
    res.objective = best_obj;
    res.continuous_value = best_cont;
    res.best_bound = best_obj;
  } else {
    res.status = BnbStatus::Infeasible;
  }
  return res;
}

void dump_ilp(const IlpInstance& inst, std::ostream& os) {
  inst.validate();
  os << std::setprecision(17);
  const Eigen::Index n = inst.objective.size();
  const Eigen::Index k = inst.rows.rows();
  os << "ilp 1\n";
  os << "amplitude " << inst.amplitude << "\n";
  os << "binaries " << n << "\n";
  os << "constraints " << k << "\n";
  os << "continuous " << (inst.has_continuous ? 1 : 0);
  if (inst.has_continuous) os << " " << inst.continuous_obj;
  os << "\n";
  os << "objective\n";
  for (Eigen::Index i = 0; i < n; ++i)
    os << inst.objective(i) << (i + 1 == n ? "" : " ");
  os << "\n";
  os << "rows\n";
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) os << inst.rows(r, i) << " ";
    if (inst.has_continuous) os << inst.continuous_coeff(r) << " ";
    os << inst.rhs(r) << "\n";
  }
  os << "end\n";
}

namespace {

std::string next_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok))
    throw std::invalid_argument(std::string("load_ilp: missing ") + what);
  return tok;
}

double next_double(std::istream& is, const char* what) {
  const std::string tok = next_token(is, what);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size())
    throw std::invalid_argument(std::string("load_ilp: bad number for ") +
                                what + ": '" + tok + "'");
  return v;
}

long next_long(std::istream& is, const char* what) {
  const double v = next_double(is, what);
  if (v != std::floor(v) || std::abs(v) > 1e12)
    throw std::invalid_argument(std::string("load_ilp: bad integer for ") +
                                what);
  return static_cast<long>(v);
}

void expect(std::istream& is, const char* word) {
  const std::string tok = next_token(is, word);
  if (tok != word)
    throw std::invalid_argument(std::string("load_ilp: expected '") + word +
                                "', got '" + tok + "'");
}

}  // namespace

IlpInstance load_ilp(std::istream& is) {
  expect(is, "ilp");
  const long version = next_long(is, "format version");
  if (version != 1)
    throw std::invalid_argument("load_ilp: unsupported format version");
  expect(is, "amplitude");
  IlpInstance inst;
  inst.amplitude = next_double(is, "amplitude");
  expect(is, "binaries");
  const long n = next_long(is, "binaries");
  if (n < 1 || n > 1'000'000)
    throw std::invalid_argument("load_ilp: binaries out of range");
  expect(is, "constraints");
  const long k = next_long(is, "constraints");
  if (k < 0 || k > 1'000'000)
    throw std::invalid_argument("load_ilp: constraints out of range");
  expect(is, "continuous");
  const long cont = next_long(is, "continuous flag");
  if (cont != 0 && cont != 1)
    throw std::invalid_argument("load_ilp: continuous flag must be 0 or 1");
  inst.has_continuous = (cont == 1);
  if (inst.has_continuous)
    inst.continuous_obj = next_double(is, "continuous objective");
  expect(is, "objective");
  inst.objective.resize(n);
  for (long i = 0; i < n; ++i)
    inst.objective(i) = next_double(is, "objective entry");
  expect(is, "rows");
  inst.rows.resize(k, n);
  inst.rhs.resize(k);
  inst.continuous_coeff = VecX::Zero(k);
  for (long r = 0; r < k; ++r) {
    for (long i = 0; i < n; ++i)
      inst.rows(r, i) = next_double(is, "row entry");
    if (inst.has_continuous)
      inst.continuous_coeff(r) = next_double(is, "row continuous coefficient");
    inst.rhs(r) = next_double(is, "row rhs");
  }
  expect(is, "end");
  inst.validate();
  return inst;
}

}  // namespace isac
