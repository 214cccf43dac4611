#include "isac/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/kernels.hpp"
#include "isac/rng.hpp"

namespace isac {

namespace {

void check_mc(const McConfig& mc) {
  if (mc.n_trials < 1000)
    throw std::invalid_argument(
        "monte carlo: refusing to estimate from fewer than 1000 trials");
  if (mc.batch < 1)
    throw std::invalid_argument("monte carlo: batch must be positive");
}

/** Compensated (Kahan) accumulator; result independent of batching. */
struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

struct TrialContext {
  std::vector<VecXc> components;  // scaled receive-side images, target first
  double noise_sd_per_part = 0.0; // per real component
  int n_rx = 0;
};

/**
 * One trial's received snapshot before the ADC: scattered components with
 * CN(0,1) gains plus thermal noise.  Draw order is fixed: target gain (H1
 * only), clutter gains in index order, then the noise vector.
 */
void fill_snapshot(VecXc& r, const TrialContext& ctx, bool target_present,
                   rng::Substream& stream) {
  r.setZero();
  for (std::size_t q = (target_present ? 0 : 1); q < ctx.components.size();
       ++q) {
    const cd gain = stream.cgauss(1.0);
    simd::kernels().caxpy(gain, ctx.components[q].data(), r.data(),
                          static_cast<std::size_t>(ctx.n_rx));
  }
  for (int i = 0; i < ctx.n_rx; ++i)
    r(i) += cd(ctx.noise_sd_per_part * stream.gauss(),
               ctx.noise_sd_per_part * stream.gauss());
}

TrialContext make_context(const VecXc& x, const RadarScene& scene,
                          const SystemConfig& cfg) {
  TrialContext ctx;
  ctx.n_rx = cfg.n_rx;
  ctx.noise_sd_per_part = std::sqrt(cfg.radar_noise_power * 0.5);
  const double sigma0 = std::sqrt(cfg.radar_snr * cfg.radar_noise_power);
  const cd a0 = (scene.target.g_tx.transpose() * x)(0, 0);
  ctx.components.push_back(sigma0 * a0 * scene.target.g_rx);
  for (std::size_t q = 0; q < scene.clutter.size(); ++q) {
    const double sq =
        std::sqrt(cfg.clutter_cnrs[q] * cfg.radar_noise_power);
    const cd aq = (scene.clutter[q].g_tx.transpose() * x)(0, 0);
    ctx.components.push_back(sq * aq * scene.clutter[q].g_rx);
  }
  return ctx;
}

struct MomentAccum {
  Kahan re, im, m2, m4;
  void add(cd z) {
    re.add(z.real());
    im.add(z.imag());
    const double a2 = std::norm(z);
    m2.add(a2);
    m4.add(a2 * a2);
  }
  /** Sample variance and its standard error. */
  void finish(std::int64_t n, double& var, double& var_stderr) const {
    const double inv = 1.0 / static_cast<double>(n);
    const double mean_sq =
        (re.sum * inv) * (re.sum * inv) + (im.sum * inv) * (im.sum * inv);
    var = m2.sum * inv - mean_sq;
    const double second = m2.sum * inv;
    const double fourth = m4.sum * inv;
    var_stderr = std::sqrt(std::max(fourth - second * second, 0.0) * inv);
  }
};

cd filtered_sample(const VecXc& f, const VecXc& r, VecXc& scratch,
                   AdcMode adc) {
  const auto& k = simd::kernels();
  const std::size_t n = static_cast<std::size_t>(r.size());
  if (adc == AdcMode::OneBit) {
    k.sign_pm1(reinterpret_cast<const double*>(r.data()),
               reinterpret_cast<double*>(scratch.data()), 2 * n);
    return k.cdotc(f.data(), scratch.data(), n);
  }
  return k.cdotc(f.data(), r.data(), n);
}

}  // namespace

McQscnrResult mc_qscnr(const VecXc& f, const VecXc& x, const RadarScene& scene,
                       const SystemConfig& cfg, const McConfig& mc,
                       AdcMode adc) {
  check_mc(mc);
  if (f.size() != cfg.n_rx || x.size() != cfg.n_tx)
    throw std::invalid_argument("mc_qscnr: dimension mismatch");
  const TrialContext ctx = make_context(x, scene, cfg);
  VecXc r(cfg.n_rx), scratch(cfg.n_rx);

  MomentAccum h0, h1;
  for (std::int64_t t = 0; t < mc.n_trials; ++t) {
    rng::Substream s0(mc.seed, rng::Stream::RadarNoiseH0,
                      static_cast<std::uint64_t>(t));
    fill_snapshot(r, ctx, false, s0);
    h0.add(filtered_sample(f, r, scratch, adc));

    rng::Substream s1(mc.seed, rng::Stream::RadarNoiseH1,
                      static_cast<std::uint64_t>(t));
    fill_snapshot(r, ctx, true, s1);
    h1.add(filtered_sample(f, r, scratch, adc));
  }

  McQscnrResult out;
  h0.finish(mc.n_trials, out.var_h0, out.var_h0_stderr);
  h1.finish(mc.n_trials, out.var_h1, out.var_h1_stderr);
  const double ratio = out.var_h1 / out.var_h0;
  out.qscnr.value = ratio - 1.0;
  out.qscnr.n = mc.n_trials;
  const double rel0 = out.var_h0_stderr / out.var_h0;
  const double rel1 = out.var_h1_stderr / out.var_h1;
  out.qscnr.std_error = ratio * std::sqrt(rel0 * rel0 + rel1 * rel1);
  return out;
}

std::vector<McRocPoint> mc_roc(const VecXc& f, const VecXc& x,
                               const RadarScene& scene,
                               const SystemConfig& cfg, const McConfig& mc,
                               const std::vector<double>& deltas,
                               AdcMode adc) {
  check_mc(mc);
  if (deltas.empty())
    throw std::invalid_argument("mc_roc: need at least one level");
  std::vector<McRocPoint> points(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    points[i].delta = deltas[i];
    points[i].threshold = threshold_for_pfa(f, x, scene, cfg, deltas[i], adc);
    points[i].pd_model = prob_detection(f, x, scene, cfg, deltas[i], adc);
  }

  const TrialContext ctx = make_context(x, scene, cfg);
  VecXc r(cfg.n_rx), scratch(cfg.n_rx);
  std::vector<std::int64_t> fa(deltas.size(), 0), det(deltas.size(), 0);
  for (std::int64_t t = 0; t < mc.n_trials; ++t) {
    rng::Substream s0(mc.seed, rng::Stream::RadarNoiseH0,
                      static_cast<std::uint64_t>(t));
    fill_snapshot(r, ctx, false, s0);
    const double stat0 = std::abs(filtered_sample(f, r, scratch, adc));
    rng::Substream s1(mc.seed, rng::Stream::RadarNoiseH1,
                      static_cast<std::uint64_t>(t));
    fill_snapshot(r, ctx, true, s1);
    const double stat1 = std::abs(filtered_sample(f, r, scratch, adc));
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      if (stat0 > points[i].threshold) ++fa[i];
      if (stat1 > points[i].threshold) ++det[i];
    }
  }

  const double n = static_cast<double>(mc.n_trials);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double p_fa = fa[i] / n;
    const double p_d = det[i] / n;
    points[i].pfa = {p_fa, std::sqrt(p_fa * (1.0 - p_fa) / n), mc.n_trials};
    points[i].pd = {p_d, std::sqrt(p_d * (1.0 - p_d) / n), mc.n_trials};
  }
  return points;
}

SymbolDesignBatch design_symbol_batch(const DesignProblem& base,
                                      int n_designs, std::uint64_t seed) {
  if (n_designs < 1)
    throw std::invalid_argument("design_symbol_batch: need designs");
  const Constellation con = psk_constellation(base.cfg.modulation_order);
  SymbolDesignBatch batch;
  batch.n_requested = n_designs;
  bool first_margin = true;
  for (int d = 0; d < n_designs; ++d) {
    rng::Substream s(seed, rng::Stream::Symbols,
                     static_cast<std::uint64_t>(d));
    std::vector<int> idx(base.cfg.n_users);
    VecXc sym(base.cfg.n_users);
    for (int u = 0; u < base.cfg.n_users; ++u) {
      idx[u] = static_cast<int>(s.next_u64() &
                                static_cast<std::uint64_t>(con.order - 1));
      sym(u) = con.points(idx[u]);
    }
    DesignProblem p = base;
    p.symbols = sym;
    DesignResult r = (p.chi > 0.0) ? design_qod(p) : design_qos(p);
    if (r.status == DesignStatus::Infeasible || r.x.size() == 0) {
      ++batch.n_infeasible;
      continue;
    }
    for (int u = 0; u < base.cfg.n_users; ++u) {
      const double a = safe_margin(p.comm_channels.row(u).transpose(), r.x,
                                   sym(u), base.cfg.modulation_order);
      if (first_margin || a < batch.alpha_min) {
        batch.alpha_min = a;
        batch.alpha_min_user = u;
        first_margin = false;
      }
    }
    batch.designs.push_back(std::move(r));
    batch.symbols.push_back(std::move(idx));
  }
  return batch;
}

McBerResult mc_ber(const DesignProblem& base, const SymbolDesignBatch& batch,
                   const McConfig& mc) {
  check_mc(mc);
  if (batch.designs.empty())
    throw std::invalid_argument("mc_ber: design batch is empty");
  const Constellation con = psk_constellation(base.cfg.modulation_order);
  const std::int64_t n_designs =
      static_cast<std::int64_t>(batch.designs.size());
  const std::int64_t n_noise =
      std::max<std::int64_t>(500, mc.n_trials / n_designs);

  std::int64_t sym_errors = 0, bit_err_count = 0;
  const std::int64_t n_users = base.cfg.n_users;
  for (std::int64_t d = 0; d < n_designs; ++d) {
    const VecXc& x = batch.designs[d].x;
    std::vector<cd> nominal(n_users);
    for (std::int64_t u = 0; u < n_users; ++u)
      nominal[u] =
          (base.comm_channels.row(u).conjugate() * x)(0, 0);
    for (std::int64_t t = 0; t < n_noise; ++t) {
      rng::Substream s(mc.seed, rng::Stream::CommNoise,
                       static_cast<std::uint64_t>(d),
                       static_cast<std::uint64_t>(t));
      for (std::int64_t u = 0; u < n_users; ++u) {
        const cd y =
            nominal[u] + s.cgauss(base.cfg.comm_noise_powers[u]);
        const int hat = decode_psk(y, con);
        const int sent = batch.symbols[d][u];
        if (hat != sent) ++sym_errors;
        bit_err_count += bit_errors(hat, sent, con);
      }
    }
  }

  McBerResult out;
  out.n_designs = n_designs;
  out.n_noise = n_noise;
  const double n_sym = static_cast<double>(n_designs * n_noise * n_users);
  const double n_bits = n_sym * con.bits_per_symbol;
  const double sep = sym_errors / n_sym;
  const double ber = bit_err_count / n_bits;
  out.sep = {sep, std::sqrt(sep * (1.0 - sep) / n_sym),
             static_cast<std::int64_t>(n_sym)};
  out.ber = {ber, std::sqrt(ber * (1.0 - ber) / n_bits),
             static_cast<std::int64_t>(n_bits)};
  out.alpha_min = batch.alpha_min;
  out.bounds_at_alpha_min =
      sep_bounds(batch.alpha_min,
                 base.cfg.comm_noise_powers[batch.alpha_min_user],
                 base.cfg.modulation_order);
  double lb_sum = 0.0, ub_sum = 0.0;
  for (std::int64_t d = 0; d < n_designs; ++d) {
    for (std::int64_t u = 0; u < n_users; ++u) {
      const double a = safe_margin(
          base.comm_channels.row(u).transpose(), batch.designs[d].x,
          con.points(batch.symbols[d][u]), base.cfg.modulation_order);
      const SepBounds b = sep_bounds(a, base.cfg.comm_noise_powers[u],
                                     base.cfg.modulation_order);
      lb_sum += b.lower;
      ub_sum += b.upper_clamped;
    }
  }
  const double n_pairs = static_cast<double>(n_designs * n_users);
  out.pooled_bounds.lower = lb_sum / n_pairs;
  out.pooled_bounds.upper = ub_sum / n_pairs;
  out.pooled_bounds.upper_clamped = out.pooled_bounds.upper;
  return out;
}

McBerResult mc_ber(const DesignProblem& base, const McConfig& mc,
                   int n_designs) {
  const SymbolDesignBatch batch =
      design_symbol_batch(base, n_designs, mc.seed);
  return mc_ber(base, batch, mc);
}

}  // namespace isac
