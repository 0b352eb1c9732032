#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sprec/solvers.hpp"

namespace sprec {

// One knob set for every experiment kind; unused fields are ignored by the
// runs that do not need them. (config, seed) fixes every artifact byte.
struct ExperimentConfig {
    std::string kind = "curve";
    std::uint64_t seed = 1;
    std::string out_dir = "results";
    int trials = 50;
    int threads = 0;  // 0 = hardware concurrency (capped at 8)

    // threshold curve
    int curve_r = 5;
    int curve_t = 6;
    std::vector<double> p_grid;  // empty = default grid 0.005..1 step 0.005

    // phase transition
    int n1 = 20;
    int n2 = 20;
    std::vector<int> rank_list = {2};
    std::vector<int> measurement_list = {100, 130, 160, 190, 220, 250};
    std::vector<double> p_list = {0.5};
    double success_threshold = 1e-3;   // relative error counted as recovery
    double cell_time_cap_seconds = 0;  // 0 = no cap; caps break determinism

    // bound verification (vector mode)
    int nv = 8;
    int mv = 20;
    std::vector<int> sparsity_list = {1, 2};
    std::vector<double> bound_p_list = {0.5, 0.8};
    std::vector<double> epsilon_list = {0.0, 0.05};
    int t_max = 4;
    std::string ensemble = "optimized";  // gaussian | normalized | optimized
    int frame_pool = 6;
    int frame_iterations = 500;
    int max_draws = 400;
    double tail_amplitude = 0.01;  // compressible tail on alternating trials

    // nsp / rip reports
    int op_m = 12;
    int op_n1 = 4;
    int op_n2 = 4;
    int nsp_r = 1;
    double nsp_p = 0.5;
    int ric_k = 2;
    int ric_rank = 1;
    int ric_probes = 2000;
    int ric_restarts = 20;

    SolverConfig solver;  // base; each run sets p/epsilon/seed itself

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct PhaseCell {
    int r = 0;
    int m = 0;
    double p = 0.0;  // 1.0 rows come from nnm_solve
    int successes = 0;
    int trials = 0;
    bool complete = true;
};

// Threshold curve CSV + JSON for (curve_r, curve_t), crossing point included.
nlohmann::json run_threshold_curve(const ExperimentConfig& config);

// Success-rate grid over (rank, measurements, p); emits
// "r,m,p,successes,trials" rows in canonical order.
std::vector<PhaseCell> run_phase_transition(const ExperimentConfig& config);

struct BoundCell {
    int k = 0;
    double p = 0.0;
    double epsilon = 0.0;
    int drawn = 0;
    int accepted = 0;
    int certified = 0;
    int violations = 0;
};

struct BoundVerificationReport {
    std::vector<BoundCell> cells;
    int drawn = 0;
    int accepted = 0;
    int certified = 0;
    int violations = 0;
    bool condition_never_met = false;  // no draw passed the RIC gate
    int noiseless_exact_trials = 0;
    double noiseless_exact_max_error = 0.0;
    double min_slack_ratio = 0.0;  // min over certified trials of bound/error

    nlohmann::json to_json() const;
};

// Theorem 2 end-to-end in vector mode: draw sensing matrices, gate on the
// exact RIC delta_{2t} < thm2_threshold(p, k, t) for some t in (k, t_max],
// solve, certify, and assert both error bounds.
BoundVerificationReport run_bound_verification(const ExperimentConfig& config);

// NSP falsifier + RIC reports for the configured operators.
nlohmann::json run_nsp_and_rip(const ExperimentConfig& config);

}  // namespace sprec
