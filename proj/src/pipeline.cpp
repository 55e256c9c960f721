#include "trime/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include "trime/error.hpp"

namespace trime {

namespace {

std::vector<double> constant_sizing(const GeometryGrid& grid) {
  return std::vector<double>(grid.cell_count(), 1.0);
}

std::vector<double> distance_sizing(const GeometryGrid& grid, const Shape& field, double a,
                                    double b, const Parallel& par) {
  std::vector<double> mu(grid.cell_count());
  par.for_each(mu.size(), [&](std::size_t c) {
    mu[c] = a + b * std::max(field.sdf(grid.midpoint(static_cast<int>(c))), 0.0);
  });
  return mu;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Mesher::Mesher(Config cfg) : cfg_(std::move(cfg)) {
  validate_config(cfg_);
  par_.threads = cfg_.threads;
}

void Mesher::initialize() {
  shape_ = build_shape(cfg_.shape, cfg_.domain, cfg_.base_dir);
  shape_->collect_segments(outline_);
  grid_ = GeometryGrid(*shape_, cfg_.domain, cfg_.n_total, cfg_.n_opt, cfg_.fac_grid, par_);

  switch (cfg_.sizing.kind) {
    case SizingSpec::Kind::Constant:
      mu_ = constant_sizing(grid_);
      rho_ = density_from_sizing(mu_);
      break;
    case SizingSpec::Kind::Distance: {
      const Shape field = build_shape(*cfg_.sizing.shape, cfg_.domain, cfg_.base_dir);
      mu_ = distance_sizing(grid_, field, cfg_.sizing.a, cfg_.sizing.b, par_);
      rho_ = density_from_sizing(mu_);
      break;
    }
    case SizingSpec::Kind::Auto: {
      SizingParams sp{cfg_.fac_s, cfg_.n_grid, cfg_.n_nei_thres, cfg_.fac_nei, cfg_.fac_geps};
      // Voronoi cells of points near the boundary reach into outer cells, so
      // the centroid quadrature needs density there too.
      const bool include_outer = cfg_.algorithm != Algorithm::DistMesh;
      SizingModel model = automatic_sizing(*shape_, grid_, cfg_.sizing.k, include_outer, sp,
                                           mix_seed(cfg_.seed, 1), par_);
      mu_ = std::move(model.mu);
      rho_ = std::move(model.rho);
      break;
    }
  }

  grid_.select_boundary_cells(cfg_.eta);
  const std::vector<double> rho_norm = normalize_density(grid_, rho_);

  const long long n_fixed = static_cast<long long>(cfg_.fixed_points.size());
  long long n_init = std::llround(cfg_.effective_fac_init() * static_cast<double>(cfg_.n_total));
  n_init = std::clamp(n_init, std::min<long long>(3, cfg_.n_total), cfg_.n_total);
  if (n_init <= n_fixed) {
    throw Error(ErrorCode::ValidationError, "fixed points leave no room for free points");
  }

  AdaptiveFactors f{cfg_.fac_retria, cfg_.fac_end, cfg_.fac_pt, cfg_.fac_geps};
  grid_.compute_adaptive(rho_norm, n_init, f);
  grid_.build_adf(*shape_, cfg_.fac_etol_adf, n_init, cfg_.n_total, cfg_.t_depth_adf, par_);

  state_ = MeshState{};
  state_.n_total = cfg_.n_total;
  const ProjectionParams proj{cfg_.newton_damping, cfg_.t_newton_ct, 100};
  init_points(state_, grid_, *shape_, rho_norm, n_init - n_fixed, mix_seed(cfg_.seed, 0), proj);
  for (const Vec2& p : cfg_.fixed_points) state_.add_point(p, categorize(p, grid_), true);
  state_.n_init = n_init;
  state_.n_current = static_cast<long long>(state_.size());

  phase_ = cfg_.algorithm == Algorithm::Cvd ? Phase::Cvd : Phase::DistMesh;
  iteration_ = 0;
  done_ = false;
  reason_.clear();
  triangulate();
  initialized_ = true;
  if (cfg_.output_interval != 0) write_iteration_mesh("mesh_initial.txt");
}

void Mesher::triangulate() {
  const auto& pts = state_.points;
  std::vector<double> spans(pts.size());
  par_.for_each(pts.size(), [&](std::size_t i) {
    const int c = grid_.cell_of(pts[i]);
    spans[i] = cfg_.fac_voro_bound * (c < 0 ? grid_.h_avg() : grid_.h(c));
  });
  const PointBins bins(pts, grid_.box(), cfg_.n_opt);
  cells_ = compute_diagram(pts, bins, spans, par_);
  const std::vector<Tri> all = extract_delaunay(cells_, par_);
  std::vector<char> keep(all.size());
  const ValidityParams vp{cfg_.t_tria_ccircum};
  par_.for_each(all.size(), [&](std::size_t t) {
    keep[t] = triangle_valid(pts[all[t][0]], pts[all[t][1]], pts[all[t][2]], grid_, *shape_, vp);
  });
  state_.triangles.clear();
  for (std::size_t t = 0; t < all.size(); ++t) {
    if (keep[t]) state_.triangles.push_back(all[t]);
  }
  state_.snapshot = state_.points;
  springs_ = SpringSystem(state_.triangles, pts.size());
  retria_ = false;
}

bool Mesher::step() {
  if (!initialized_) initialize();
  if (done_) return true;
  try {
    if (phase_ == Phase::Cvd || retria_) triangulate();
    state_.history.push_back(quality_stats(state_.points, state_.triangles, par_));

    std::vector<Vec2> proposed;
    if (phase_ == Phase::DistMesh) {
      const DistMeshParams dp{cfg_.fac_f, cfg_.spring_k, cfg_.dt};
      proposed = distmesh_step(state_.points, state_.frozen, springs_, grid_, mu_, dp, par_);
    } else {
      proposed = cvd_step(state_.points, state_.frozen, state_.prev_move, cells_, grid_, rho_, par_);
    }

    const ProjectionParams proj{cfg_.newton_damping, cfg_.t_newton_ct, 100};
    par_.for_each(state_.size(), [&](std::size_t i) {
      if (state_.frozen[i]) {
        state_.prev_move[i] = 0;
        return;
      }
      const Vec2 old = state_.points[i];
      const Treated t =
          treat_new_position(old, state_.category[i], proposed[i], grid_, *shape_, proj);
      state_.points[i] = t.p;
      state_.category[i] = t.category;
      state_.prev_move[i] = dist(old, t.p);
    });
    ++iteration_;

    if (phase_ == Phase::DistMesh && needs_retriangulation(state_.points, state_.snapshot, grid_)) {
      retria_ = true;
    }

    const AdditionParams ap{cfg_.t_add_quality, cfg_.fac_add};
    if (maybe_add_points(state_, grid_, ap) > 0) {
      retria_ = true;
    } else {
      if (cfg_.algorithm == Algorithm::Hybrid && state_.history.size() >= 2) {
        const auto& h = state_.history;
        const double change = relative_change(h[h.size() - 2].half_alpha, h.back().half_alpha);
        const Phase next = hybrid_decide(phase_, state_.n_current, state_.n_total, change,
                                         cfg_.t_switch_quality);
        if (next != phase_) {
          phase_ = next;
          retria_ = true;
        }
      }
      const TerminationParams tp{cfg_.t_end_quality, cfg_.t_end_alpha_max};
      const Termination term = check_termination(state_, grid_, tp);
      if (term.stop) {
        done_ = true;
        reason_ = term.reason;
      }
    }
    if (!done_ && iteration_ >= cfg_.max_iterations) {
      done_ = true;
      reason_ = "iteration_cap";
    }
  } catch (const Error& e) {
    throw Error(e.code(), "iteration " + std::to_string(iteration_) + ": " + e.what());
  }
  if (cfg_.output_interval > 0 && iteration_ % cfg_.output_interval == 0) {
    write_iteration_mesh("mesh_iter_" + std::to_string(iteration_) + ".txt");
  }
  return done_;
}

void Mesher::write_iteration_mesh(const std::string& name) const {
  std::filesystem::create_directories(cfg_.output_dir);
  write_mesh(std::filesystem::path(cfg_.output_dir) / name, state_.points, state_.category,
             state_.triangles);
}

RunReport Mesher::finalize(bool write_files) {
  triangulate();
  RunReport r;
  r.iterations = iteration_;
  r.reason = reason_.empty() ? "not_terminated" : reason_;
  r.summary = summary_stats(state_.points, state_.triangles);
  if (write_files) {
    const std::filesystem::path dir(cfg_.output_dir);
    std::filesystem::create_directories(dir);
    write_mesh(dir / "mesh_final.txt", state_.points, state_.category, state_.triangles);
    write_svg(dir / "mesh_final.svg", state_.points, state_.triangles, grid_.box(), outline_);
    RunInfo info{algorithm_name(cfg_.algorithm), iteration_, r.reason,
                 static_cast<long long>(state_.size())};
    write_text(dir / "stats.txt", format_stats(state_.history, r.summary, info));
  }
  return r;
}

RunReport Mesher::run(bool write_files) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!initialized_) initialize();
  while (!step()) {
  }
  RunReport r = finalize(write_files);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RunReport run_pipeline(const Config& cfg, bool write_files) {
  Mesher m(cfg);
  return m.run(write_files);
}

}  // namespace trime
