#include "crfc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "crfc/bench.hpp"
#include "crfc/model_io.hpp"
#include "crfc/sampling.hpp"

namespace crfc {

namespace {

struct Suite {
  std::vector<VerifyCheck>* out;
  std::string module;

  // f returns the worst normalized error; a thrown Error counts as failure
  void check(const std::string& name, double tol, const std::function<double()>& f) {
    VerifyCheck c;
    c.module = module;
    c.name = name;
    c.tol = tol;
    try {
      c.worst = f();
      c.passed = c.worst <= tol;
    } catch (const Error&) {
      c.worst = std::numeric_limits<double>::infinity();
    }
    out->push_back(c);
  }
};

Mat3 rigid_rotation(Sampler& s, Regime r) { return r == Regime::Plane ? s.planar_rotation() : s.rotation(); }

void rotkit(Suite& st, Sampler& s) {
  st.check("exp/log round trip below pi/2", 1e-11, [&] {
    double w = 0;
    for (int k = 0; k < 200; ++k) {
      Vec3 v = s.vec();
      v *= s.uniform(0.0, M_PI / 2 - 0.05) / v.norm();
      w = std::max(w, (skew_axial<double>(log_rot<double>(exp_rotvec<double>(v))) - v).norm());
    }
    return w;
  });
  st.check("exp is a proper rotation", 1e-12, [&] {
    double w = 0;
    for (int k = 0; k < 200; ++k) {
      const Mat3 r = exp_rotvec<double>(Vec3(s.vec(-3, 3)));
      w = std::max({w, (r.transpose() * r - Mat3::Identity()).norm(), std::abs(r.determinant() - 1)});
    }
    return w;
  });
  st.check("angle-axis reproduces the rotation", 1e-12, [&] {
    double w = 0;
    for (int k = 0; k < 200; ++k) {
      const Mat3 r = s.rotation(3.1);
      const auto [a, e] = extract_angle_axis(r);
      w = std::max(w, (exp_rotvec<double>(Vec3(a * e)) - r).norm());
    }
    return w;
  });
}

void csfd(Suite& st, Sampler& s) {
  st.check("derivative of exp(x) + x^2 + 1 at 0.5", 1e-12, [] {
    const double d = derivative_scalar([](Complex x) { return std::exp(x) + x * x + 1.0; }, 0.5);
    return std::abs(d - 2.64872127070013);
  });
  st.check("jacobian of a polynomial map", 1e-13, [&] {
    double w = 0;
    for (int k = 0; k < 20; ++k) {
      VectorXd x(3);
      x << s.uniform(-2, 2), s.uniform(-2, 2), s.uniform(-2, 2);
      const MatrixXd j = jacobian(
          [](const VecX<Complex>& z) {
            VecX<Complex> y(2);
            y(0) = z(0) * z(1) + z(2) * z(2) * z(2);
            y(1) = std::sin(z(0)) * z(2);
            return y;
          },
          x);
      MatrixXd ref(2, 3);
      ref << x(1), x(0), 3 * x(2) * x(2), std::cos(x(0)) * x(2), 0, std::sin(x(0));
      w = std::max(w, (j - ref).norm() / ref.norm());
    }
    return w;
  });
}

void elements(Suite& st, Sampler& s) {
  st.check("local stiffness symmetric", 1e-12, [&] {
    double w = 0;
    for (auto [kind, fs] : all_kind_strategies()) {
      const ElementRef ref = s.element(kind, fs);
      w = std::max(w, (ref.K - ref.K.transpose()).norm() / ref.K.norm());
    }
    return w;
  });
  st.check("local stiffness positive semi-definite", 1e-10, [&] {
    double w = 0;
    for (auto [kind, fs] : all_kind_strategies()) {
      const ElementRef ref = s.element(kind, fs);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (ref.K + ref.K.transpose()));
      w = std::max(w, -es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff());
    }
    return w;
  });
}

void frames(Suite& st, Sampler& s) {
  st.check("frames orthonormal on deformed states", 1e-12, [&] {
    double w = 0;
    for (auto [kind, fs] : all_kind_strategies()) {
      const ElementRef ref = s.element(kind, fs);
      for (int k = 0; k < 10; ++k) {
        const auto c = s.deformed(ref, 0.05, 0.2);
        const Mat3 r = evaluate_frame<double>(ref.frame, c.x, c.triads).R;
        w = std::max({w, (r.transpose() * r - Mat3::Identity()).norm(), std::abs(r.determinant() - 1)});
      }
    }
    return w;
  });
  st.check("frames follow rigid motion", 1e-10, [&] {
    double w = 0;
    for (auto [kind, fs] : all_kind_strategies()) {
      const ElementRef ref = s.element(kind, fs);
      const Mat3 q = rigid_rotation(s, ref.regime);
      const auto c = s.rigid(ref, q, Vec3::Zero());
      const Mat3 r = evaluate_frame<double>(ref.frame, c.x, c.triads).R;
      w = std::max(w, (r - q * ref.R0).norm());
    }
    return w;
  });
}

void corot(Suite& st, Sampler& s) {
  st.check("rigid motion gives zero force (S, SP)", 1e-9, [&] {
    double w = 0;
    for (auto [kind, fs] : all_kind_strategies()) {
      const ElementRef ref = s.element(kind, fs);
      for (int k = 0; k < 10; ++k) {
        Vec3 d = s.vec(-5, 5);
        if (ref.regime == Regime::Plane) d.z() = 0;
        const auto c = s.rigid(ref, rigid_rotation(s, ref.regime), d);
        const double sc = ref.mat.E * ref.diameter();
        w = std::max({w, force_S<double>(ref, c).norm() / sc, force_SP<double>(ref, c).norm() / sc});
      }
    }
    return w;
  });
  st.check("spin-fitter bi-orthogonality", 1e-8, [&] {
    double w = 0;
    for (auto [kind, fs] : all_kind_strategies()) {
      const ElementRef ref = s.element(kind, fs);
      for (int k = 0; k < 5; ++k) {
        const auto c = s.deformed(ref, 0.05, 0.2);
        const auto ls = local_state<double>(ref, c);
        const MatrixXd gs = spin_fitter<double>(ref, c, ls.frame) * spin_lever<double>(ref, ls.xbar);
        w = std::max(w, (gs - MatrixXd::Identity(ref.sdim(), ref.sdim())).norm());
      }
    }
    return w;
  });
  st.check("projected force is moment balanced", 1e-9, [&] {
    double w = 0;
    for (auto [kind, fs] : all_kind_strategies()) {
      const ElementRef ref = s.element(kind, fs);
      for (int k = 0; k < 5; ++k) {
        const auto c = s.deformed(ref, 0.05, 0.2);
        const VectorXd f = force_SP<double>(ref, c);
        w = std::max(w, unbalanced_moment(ref.regime, f, c.x).norm() / std::max(1.0, f.norm() * ref.diameter()));
      }
    }
    return w;
  });
}

void correction(Suite& st, Sampler& s) {
  const std::vector<std::pair<ElementKind, FrameStrategy>> kinds = all_kind_strategies();
  st.check("CaseI corrected force is self-equilibrated", 1e-10, [&] {
    double w = 0;
    for (auto [kind, fs] : kinds) {
      const ElementRef ref = s.element(kind, fs);
      for (int k = 0; k < 5; ++k) {
        // CaseII/III fix some rows and cannot balance every force; CaseI can
        const auto c = s.deformed(ref, 0.05, 0.2);
        const VectorXd f = force_S<double>(ref, c);
        const VectorXd g =
            constraint<double>(ref.regime, VectorXd(f + correct(ref.regime, f, c.x, WeightCase::CaseI).fc), c.x);
        w = std::max(w, g.norm() / (1.0 + f.lpNorm<Eigen::Infinity>() * ref.diameter()));
      }
    }
    return w;
  });
  st.check("CaseII/III balance element S forces", 1e-10, [&] {
    double w = 0;
    for (auto [kind, fs] : kinds) {
      const ElementRef ref = s.element(kind, fs);
      if (!ref.rotations()) continue;
      for (int k = 0; k < 5; ++k) {
        const auto c = s.deformed(ref, 0.05, 0.2);
        const VectorXd f = force_S<double>(ref, c);
        for (WeightCase wc : {WeightCase::CaseII, WeightCase::CaseIII}) {
          const VectorXd g = constraint<double>(ref.regime, VectorXd(f + correct(ref.regime, f, c.x, wc).fc), c.x);
          w = std::max(w, g.norm() / (1.0 + f.lpNorm<Eigen::Infinity>() * ref.diameter()));
        }
      }
    }
    return w;
  });
  st.check("balanced force needs no correction", 1e-10, [&] {
    double w = 0;
    for (auto [kind, fs] : kinds) {
      const ElementRef ref = s.element(kind, fs);
      const auto c = s.deformed(ref, 0.05, 0.2);
      const VectorXd f = force_SP<double>(ref, c);
      for (WeightCase wc : {WeightCase::CaseI, WeightCase::CaseII, WeightCase::CaseIII}) {
        if (!ref.rotations() && wc != WeightCase::CaseI) continue;
        w = std::max(w, correct(ref.regime, f, c.x, wc).fc.norm() / std::max(1.0, f.norm()));
      }
    }
    return w;
  });
  st.check("CaseI projector idempotent", 1e-12, [&] {
    double w = 0;
    for (auto [kind, fs] : kinds) {
      const ElementRef ref = s.element(kind, fs);
      const auto c = s.deformed(ref, 0.05, 0.2);
      const MatrixXd p = p_linear_transpose(ref.regime, c.x);
      w = std::max(w, (p * p - p).norm() / p.norm());
    }
    return w;
  });
}

void solver(Suite& st, Sampler&) {
  st.check("zero load keeps the reference state", 1e-14, [] {
    Benchmark b = generate("spatial-angle-frame", {std::nullopt, 2});
    b.model.loads.clear();
    const Prepared p(b.model);
    SolverConfig cfg;
    cfg.steps = 2;
    const RunResult r = run(p, cfg);
    if (!r.completed) return std::numeric_limits<double>::infinity();
    return r.history.back().state.u.norm();
  });
  st.check("parallel assembly equals serial", 0.0, [] {
    const Benchmark b = generate("pretwisted-beam");
    const Prepared p(b.model);
    GlobalState s = initial_state(b.model);
    s.u.setConstant(1e-3);
    double w = 0;
    for (Method m : b.methods) {
      const Assembly a = assemble_serial(p, s, m);
      const Assembly c = assemble_parallel(p, s, m);
      w = std::max({w, (a.fint - c.fint).cwiseAbs().maxCoeff(), (a.K - c.K).cwiseAbs().maxCoeff()});
    }
    return w;
  });
  st.check("bar matches the closed-form equilibrium", 1e-8, [] {
    const Benchmark b = generate("bar-sanity");
    const Prepared p(b.model);
    SolverConfig cfg;
    cfg.method = Method::SP;
    cfg.tol = 1e-12;
    cfg.steps = b.steps;
    const RunResult r = run(p, cfg);
    if (!r.completed) return std::numeric_limits<double>::infinity();
    // node 1 slides in y; equilibrium of the axial force component
    const Vec3 x0 = b.model.nodes[0], x1 = b.model.nodes[1];
    const double l0 = (x1 - x0).norm();
    const double ea = b.model.elements[0].mat.E * b.model.elements[0].mat.thickness;
    const double v = r.history.back().state.u(3);
    const Vec3 d = x1 + Vec3(0, v, 0) - x0;
    const double n = ea * (d.norm() - l0) / l0;
    return std::abs(n * d.y() / d.norm() - 10.0) / 10.0;
  });
}

void bench(Suite& st, Sampler&) {
  st.check("benchmark CSV is deterministic", 0.0, [] {
    const Benchmark b = generate("spatial-angle-frame", {std::nullopt, 3});
    const Prepared p(b.model);
    SolverConfig cfg;
    cfg.steps = b.steps;
    return history_csv(b.model, run(p, cfg)) == history_csv(b.model, run(p, cfg)) ? 0.0 : 1.0;
  });
  st.check("model file round trip", 0.0, [] {
    double w = 0;
    for (const auto& name : benchmark_names()) {
      const Benchmark b = generate(name);
      const std::string t = write_model(b.model);
      if (write_model(parse_model(t)) != t) w = 1;
    }
    return w;
  });
}

const std::vector<std::pair<std::string, std::function<void(Suite&, Sampler&)>>>& suites() {
  static const std::vector<std::pair<std::string, std::function<void(Suite&, Sampler&)>>> all = {
      {"rotkit", rotkit}, {"csfd", csfd},   {"elements", elements}, {"frames", frames},
      {"corot", corot},   {"correction", correction}, {"solver", solver}, {"bench", bench}};
  return all;
}

}  // namespace

std::vector<std::string> verify_modules() {
  std::vector<std::string> out;
  for (const auto& s : suites()) out.push_back(s.first);
  return out;
}

std::vector<VerifyCheck> run_verify(std::uint64_t seed, const std::string& only) {
  const auto names = verify_modules();
  if (!only.empty() && std::find(names.begin(), names.end(), only) == names.end())
    throw Error(ErrorCode::InvalidArgument, "unknown module '" + only + "'");
  std::vector<VerifyCheck> out;
  for (const auto& [name, fn] : suites()) {
    if (!only.empty() && name != only) continue;
    // one stream per module so --only reproduces the full run's samples
    Sampler s(seed * 1000003u + std::hash<std::string>{}(name));
    Suite st{&out, name};
    fn(st, s);
  }
  return out;
}

}  // namespace crfc
