// czkit: set-valued state estimation and active fault diagnosis for linear
// descriptor systems, driven by JSON scenario files.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "czkit/afd.hpp"
#include "czkit/estimator.hpp"
#include "czkit/spec_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitAfdInfeasible = 4;

// Shortest round-trip decimal representation.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path p = std::filesystem::path(dir) / name;
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    return out;
}

struct EstimateOptions {
    std::string spec_path, out_dir;
    std::int64_t seed = -1;
    int horizon = -1;
    int vol_samples = 2048;
};

int cmd_estimate(const EstimateOptions& opt) {
    czkit::ScenarioSpec spec;
    try {
        spec = czkit::load_scenario(opt.spec_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    const czkit::DescriptorModel& m = spec.bank.models.front();
    const int K = opt.horizon >= 0 ? opt.horizon : spec.horizon;
    const std::uint64_t seed = opt.seed >= 0 ? static_cast<std::uint64_t>(opt.seed) : spec.seed;
    const czkit::UncertaintyBounds bounds = spec.bounds();
    const int xi = std::min(2, m.n() - 1);  // plotted coordinate

    bool all_contained = true;
    try {
        const czkit::SvdTransform t = czkit::decompose(m);
        const std::vector<czkit::Vector> useq(K + 1, czkit::Vector::Zero(m.n_u()));
        const czkit::Trajectory truth =
            czkit::simulate_truth(m, t, bounds, spec.bank.X0.c, useq, K, seed);

        czkit::EstimatorState cz =
            czkit::make_initial_state(m, t, bounds, useq[0], truth.outputs[0], spec.limits);
        czkit::EstimatorState zo = cz;
        zo.Zhat = czkit::relax_to_zonotope(cz.Zhat, spec.limits.max_generators);
        zo.Xhat = czkit::linear_map(t.T, zo.Zhat);

        std::ofstream csv = open_out(opt.out_dir, "estimation.csv");
        csv << "k,cz_radius,zono_radius,cz_vol,cz_vol_stderr,zono_vol,zono_vol_stderr,"
               "x3_lo_cz,x3_hi_cz,x3_lo_zono,x3_hi_zono,x3_true,contained\n";

        for (int k = 0; k <= K; ++k) {
            if (k > 0) {
                cz = czkit::step(cz, t, m, bounds, useq[k - 1], useq[k], truth.outputs[k],
                                 spec.limits);
                zo = cz;
                zo.Zhat = czkit::relax_to_zonotope(cz.Zhat, spec.limits.max_generators);
                zo.Xhat = czkit::linear_map(t.T, zo.Zhat);
            }
            const czkit::VolumeEstimate vcz =
                czkit::mc_volume(cz.Xhat, opt.vol_samples, seed * 1000003ull + 2 * k);
            const czkit::VolumeEstimate vzo =
                czkit::mc_volume(zo.Xhat, opt.vol_samples, seed * 1000003ull + 2 * k + 1);
            const czkit::IntervalBox hcz = czkit::interval_hull(cz.Xhat);
            const czkit::IntervalBox hzo = czkit::interval_hull(zo.Xhat);
            const bool contained = czkit::contains_point(cz.Xhat, truth.states[k], 1e-7);
            all_contained = all_contained && contained;

            csv << k << ',' << fmt(czkit::radius(cz.Xhat)) << ',' << fmt(czkit::radius(zo.Xhat))
                << ',' << fmt(vcz.estimate) << ',' << fmt(vcz.std_error) << ','
                << fmt(vzo.estimate) << ',' << fmt(vzo.std_error) << ',' << fmt(hcz.lower(xi))
                << ',' << fmt(hcz.upper(xi)) << ',' << fmt(hzo.lower(xi)) << ','
                << fmt(hzo.upper(xi)) << ',' << fmt(truth.states[k](xi)) << ','
                << (contained ? "true" : "false") << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEstimation;
    }

    if (!all_contained) {
        std::cerr << "error: true state escaped the estimated set\n";
        return kExitEstimation;
    }
    return kExitOk;
}

void write_set_polyline(std::ofstream& csv, const std::string& stage, int model_1based,
                        const czkit::ConstrainedZonotope& Y) {
    const int dirs = 64;
    for (int d = 0; d < dirs; ++d) {
        const double th = 2.0 * std::numbers::pi * d / dirs;
        czkit::Vector dir = czkit::Vector::Zero(Y.dim());
        dir(0) = std::cos(th);
        if (Y.dim() > 1) dir(1) = std::sin(th);
        const czkit::Vector p = czkit::support_point(Y, dir);
        csv << stage << ',' << model_1based << ',' << d << ',' << fmt(p(0)) << ','
            << fmt(Y.dim() > 1 ? p(1) : 0.0) << '\n';
    }
}

struct AfdDesignOptions {
    std::string spec_path, out_dir;
    int nmax = 6;
    double eps = -1.0;
};

int cmd_afd_design(const AfdDesignOptions& opt) {
    czkit::ScenarioSpec spec;
    try {
        spec = czkit::load_scenario(opt.spec_path);
        if (spec.bank.models.size() < 2) {
            throw std::runtime_error("afd design needs at least two models");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    const int nu = spec.bank.models.front().n_u();
    const double eps = opt.eps > 0 ? opt.eps : spec.epsilon;
    const czkit::DesignResult res = czkit::design_input(
        spec.bank, opt.nmax, eps, czkit::Matrix::Identity(nu, nu), spec.seed);
    if (!res.found) {
        std::cerr << "error: no separating input found up to N = " << opt.nmax << "\n";
        return kExitAfdInfeasible;
    }

    std::ofstream csv = open_out(opt.out_dir, "afd_design.csv");
    csv << "N_found";
    for (int k = 0; k <= res.N_found; ++k)
        for (int c = 0; c < nu; ++c) csv << ",u_" << k << "_" << c;
    for (const czkit::SeparationCertificate& cert : res.certs)
        csv << ",delta_" << cert.i + 1 << "_" << cert.j + 1;
    csv << '\n' << res.N_found;
    for (const czkit::Vector& u : res.useq.u)
        for (int c = 0; c < nu; ++c) csv << ',' << fmt(u(c));
    for (const czkit::SeparationCertificate& cert : res.certs) csv << ',' << fmt(cert.delta_hat);
    csv << '\n';

    {
        std::ofstream uj = open_out(opt.out_dir, "useq.json");
        uj << czkit::serialize_input_sequence(res.useq);
    }

    std::ofstream sets = open_out(opt.out_dir, "afd_sets.csv");
    sets << "stage,model,idx,y1,y2\n";
    const std::vector<czkit::AugmentedModel> ams = czkit::augment(spec.bank);
    const czkit::Vector u0zero = czkit::Vector::Zero(nu);
    for (size_t i = 0; i < ams.size(); ++i) {
        const czkit::ConstrainedZonotope Z0 = czkit::initial_feasible_set(ams[i], u0zero);
        const czkit::ConstrainedZonotope Y0 =
            czkit::output_reach(ams[i], Z0, u0zero, spec.bank.V);
        write_set_polyline(sets, "Y0", static_cast<int>(i) + 1, Y0);
    }
    for (size_t i = 0; i < ams.size(); ++i) {
        const czkit::ConstrainedZonotope Z0 =
            czkit::initial_feasible_set(ams[i], res.useq.u.front());
        const czkit::ConstrainedZonotope ZN = czkit::reach_recursive(ams[i], Z0, res.useq);
        const czkit::ConstrainedZonotope YN =
            czkit::output_reach(ams[i], ZN, res.useq.u.back(), spec.bank.V);
        write_set_polyline(sets, "YN", static_cast<int>(i) + 1, YN);
    }
    return kExitOk;
}

struct AfdVerifyOptions {
    std::string spec_path, useq_path, out_dir;
};

int cmd_afd_verify(const AfdVerifyOptions& opt) {
    czkit::ScenarioSpec spec;
    czkit::InputSequence useq;
    try {
        spec = czkit::load_scenario(opt.spec_path);
        useq = czkit::load_input_sequence(opt.useq_path, spec.bank.models.front().n_u());
        if (useq.horizon() != spec.horizon) {
            throw std::runtime_error("input sequence has horizon " +
                                     std::to_string(useq.horizon()) + ", scenario expects " +
                                     std::to_string(spec.horizon));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    const std::vector<czkit::AugmentedModel> ams = czkit::augment(spec.bank);
    const std::vector<czkit::SeparationProblem> problems =
        czkit::separation_problems(ams, spec.bank.V, useq.horizon(), true);
    const std::vector<czkit::SeparationCertificate> certs = czkit::verify_input(problems, useq);

    std::ofstream csv = open_out(opt.out_dir, "certificates.csv");
    csv << "q,i,j,delta_hat,separated\n";
    bool ok = true;
    for (size_t q = 0; q < certs.size(); ++q) {
        const bool sep = certs[q].delta_hat >= spec.epsilon;
        ok = ok && sep;
        csv << q << ',' << certs[q].i + 1 << ',' << certs[q].j + 1 << ','
            << fmt(certs[q].delta_hat) << ',' << (sep ? "true" : "false") << '\n';
    }
    return ok ? kExitOk : kExitAfdInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained-zonotope estimation and active fault diagnosis"};
    app.require_subcommand(1);

    EstimateOptions est;
    CLI::App* estimate = app.add_subcommand("estimate", "Run the set-valued estimator");
    estimate->add_option("spec", est.spec_path, "scenario file")->required();
    estimate->add_option("-o,--out", est.out_dir, "output directory")->required();
    estimate->add_option("--seed", est.seed, "override scenario seed");
    estimate->add_option("--horizon", est.horizon, "override scenario horizon");
    estimate->add_option("--volsamples", est.vol_samples, "Monte Carlo volume samples");

    CLI::App* afd = app.add_subcommand("afd", "Active fault diagnosis");
    afd->require_subcommand(1);

    AfdDesignOptions des;
    CLI::App* design = afd->add_subcommand("design", "Design a separating input");
    design->add_option("spec", des.spec_path, "scenario file")->required();
    design->add_option("-o,--out", des.out_dir, "output directory")->required();
    design->add_option("--nmax", des.nmax, "maximum horizon to try");
    design->add_option("--eps", des.eps, "separation threshold (default: scenario epsilon)");

    AfdVerifyOptions ver;
    CLI::App* verify = afd->add_subcommand("verify", "Certify an input sequence");
    verify->add_option("spec", ver.spec_path, "scenario file")->required();
    verify->add_option("useq", ver.useq_path, "input sequence file")->required();
    verify->add_option("-o,--out", ver.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (estimate->parsed()) return cmd_estimate(est);
        if (design->parsed()) return cmd_afd_design(des);
        if (verify->parsed()) return cmd_afd_verify(ver);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
