#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlcu/exact.hpp"
#include "rlcu/filter_lcu.hpp"

namespace rlcu {

class InfeasiblePlan : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class UnstableRatio : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class NoPeak : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- parameter selection ------------------------------------------------------

struct PropertyInputs {
    double Delta = 1.0;
    double eta = 1.0;
    double eps = 0.05;
    double O_norm = 1.0;   // spectral norm
    double O_norm1 = 1.0;  // Pauli 1-norm
    double vartheta = 0.1;
    int k = 1;
    double lambda = 1.0;
    Basis basis = Basis::pauli;
    SegmentMode mode = SegmentMode::general;
};

FilterPlan parameter_selection(const PropertyInputs& in);

struct EnergyInputs {
    double Delta = 1.0;
    double eta = 1.0;
    double kappa = 0.1;
    double vartheta = 0.1;
    int k = 1;
    double lambda = 1.0;
    double E_lo = -1.0, E_hi = 1.0;  // search window
    Basis basis = Basis::pauli;
    SegmentMode mode = SegmentMode::general;
};

// Fixed budget eps_tau = eps_c = eps_n = 0.1, grid spacing kappa/4.
FilterPlan energy_plan(const EnergyInputs& in);

// Observable plan when omega is only known to within kappa: the filter at the
// true energy is damped by g(kappa) = exp(-tau^2 kappa^2), so the effective
// overlap is eta exp(-2 tau^2 kappa^2). Refuses tau kappa > 1.
FilterPlan unknown_energy_plan(PropertyInputs in, double kappa);

// N_s = 2 c^4 |O|_1^2 ln(1/vartheta) / eps_n^2 with c = 2, at least 1
long long shots_required(double O_norm1, double eps_n, double vartheta);

// ---- shots --------------------------------------------------------------------

struct ShotRecord {
    double t_i = 0.0, t_j = 0.0;
    int a = 0, b = 0;
    cplx d_hat{1.0, 1.0};
    int l = 0;
    // everything in v_hat except exp(i omega (t_i - t_j)) and d_hat:
    // Z_c^2 w_i conj(w_j) |O|_1 sgn(o_l)
    cplx amp{1.0, 0.0};

    cplx value(double omega) const;
};

enum class EstimatorPath { sampled, exact_overlap, analytic };
EstimatorPath parse_estimator_path(const std::string& s);
std::string to_string(EstimatorPath p);

struct ShotOptions {
    std::uint64_t seed = 1;
    EstimatorPath path = EstimatorPath::sampled;
    bool fixed_c = true;  // c(mu) = 2 padding; false weights each instance by mu_total
    bool parallel = true;
    long long shots_override = 0;  // 0: plan N_s
    double vartheta = 0.1;         // confidence of the reported Hoeffding half-widths
};

// Draws instances, runs them and records the Hadamard-test outcomes.
class ShotEngine {
public:
    ShotEngine(const Hamiltonian& H, const StateVector& psi0, const Hamiltonian& O, const FilterPlan& plan,
               bool fixed_c = true);

    const FilterLcu& filter() const { return filter_; }
    double Z_c() const { return Z_c_; }
    double O_norm1() const { return O_norm1_; }
    // largest |Re v_hat| for the numerator and denominator pools
    double bound_N() const;
    double bound_D() const;

    // numerator pool: two evolutions, importance-sampled O term
    ShotRecord shoot_N(Rng& rng, bool sample_outcomes = true) const;
    // denominator pool: single evolution over x1 - x2, O = I
    ShotRecord shoot_D(Rng& rng, bool sample_outcomes = true) const;

    // Shots in fixed chunks with one stream per (seed, pool, chunk); parallel and
    // serial runs give identical records.
    std::vector<ShotRecord> run_pool(bool numerator, long long shots, std::uint64_t seed, bool parallel,
                                     bool sample_outcomes = true) const;

    static constexpr long long kChunk = 256;

private:
    // Returns the state after the padded instance and its weight.
    void evolve(double t, int mu_scale, double C, Rng& rng, StateVector& out, cplx& w) const;

    FilterLcu filter_;
    StateVector psi0_;
    std::vector<PauliString> O_terms_;
    std::vector<double> O_sign_, O_cdf_;
    double O_norm1_ = 0.0;
    double Z_c_ = 1.0;
    bool fixed_c_ = true;
};

// Hadamard-test outcome draw for overlap z.
void draw_outcomes(cplx z, Rng& rng, int& a, int& b);

// ---- accumulation ----------------------------------------------------------------

struct PoolStats {
    double mean = 0.0;  // real part
    double mean_im = 0.0;
    double stderr_ = 0.0;
    double hoeffding = 0.0;  // half-width at confidence 1 - vartheta
    long long shots = 0;
};

PoolStats pool_stats(const std::vector<ShotRecord>& recs, double omega, double bound, double vartheta);

struct EstimateReport {
    EstimatorPath path = EstimatorPath::sampled;
    cplx N_hat{0.0, 0.0};
    double D_hat = 0.0;
    std::vector<double> omega_grid;
    std::vector<double> D_grid;  // D_hat per grid point, one shot set
    double ratio = 0.0;
    double stderr_N = 0.0, stderr_D = 0.0, stderr_ratio = 0.0;
    double hoeffding_N = 0.0, hoeffding_D = 0.0;
    long long shots_N = 0, shots_D = 0;
    bool unstable = false;
    FilterPlan plan;

    std::string text() const;
    static std::string csv_header();
    std::string csv_row() const;
};

// Combines numerator and denominator pools at omega (asymmetric estimator).
EstimateReport accumulate(const std::vector<ShotRecord>& num, const std::vector<ShotRecord>& den,
                          const FilterPlan& plan, double omega, double bound_N, double bound_D,
                          double vartheta = 0.1);

// D_hat(omega) for each grid point from one shot set
std::vector<double> accumulate_D_grid(const std::vector<ShotRecord>& den, const std::vector<double>& grid);

// ---- quadrature (infinite-shot limit) ----------------------------------------------

struct AnalyticND {
    cplx N{0.0, 0.0};
    cplx D{0.0, 0.0};      // expectation of the denominator sampler
    cplx D_norm{0.0, 0.0};  // |g psi0|^2 from the same truncated filter
};

// Expectation of the sampled estimators for this plan, by composite Gauss-Legendre
// quadrature over the truncated evolutions.
AnalyticND analytic_N_and_D(const Hamiltonian& H, const StateVector& psi0, const Hamiltonian& O,
                            const FilterPlan& plan, int npts = 8);

// D(omega) along a grid from one set of quadrature overlaps
std::vector<double> analytic_D_curve(const Hamiltonian& H, const StateVector& psi0, const FilterPlan& plan,
                                     const std::vector<double>& grid, int npts = 8);

// ---- drivers -------------------------------------------------------------------------

struct ObservableResult {
    double value = 0.0;
    double error = 0.0;  // propagated Hoeffding half-width (sampled paths)
    EstimateReport report;
};

ObservableResult estimate_observable(const Hamiltonian& H, const StateVector& psi0, const Hamiltonian& O,
                                     const FilterPlan& plan, const ShotOptions& opt = {},
                                     std::vector<ShotRecord>* num_out = nullptr,
                                     std::vector<ShotRecord>* den_out = nullptr);

struct EnergySearchResult {
    double E_hat = 0.0;
    std::size_t index = 0;
    std::vector<double> grid;
    std::vector<double> D;
    double stderr_ = 0.0;
    long long shots = 0;
};

// argmax of D_hat over plan.omega_grid from one shared shot pool
EnergySearchResult search_eigenenergy(const Hamiltonian& H, const StateVector& psi0, const FilterPlan& plan,
                                      const ShotOptions& opt = {});
// argmax with ties to the lowest omega; shared by both paths
std::size_t peak_index(const std::vector<double>& D);

// ---- ancilla-free scheme --------------------------------------------------------------

struct AncillaFreeEstimate {
    cplx value{0.0, 0.0};
    double r = 0.0, theta = 0.0;
    double stderr_r = 0.0;
    cplx reference_phase{1.0, 0.0};
};

// Estimates <psi0|U|psi0> for a symmetry-basis instance without a control qubit:
// |.|^2 by sampling U|psi0> in the computational basis, and the phase from the
// superposition (|vac> + |psi0>)/sqrt2 with the all-zeros reference.
AncillaFreeEstimate ancilla_free_amplitude_phase(const StateVector& psi0, const CircuitInstance& inst,
                                                 const TrotterCircuit& trotter, long long shots, Rng& rng);

std::string shot_csv_header();
void write_shot_csv(std::ostream& os, const std::vector<ShotRecord>& recs, long long id_offset = 0);

}  // namespace rlcu
