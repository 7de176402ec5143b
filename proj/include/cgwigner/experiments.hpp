#pragma once

#include "cgwigner/negativity.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace cgw {

struct SweepRow {
    StateKind kind = StateKind::HODiagonal;
    int n = 0;
    std::optional<int> m; ///< set for off-diagonal rows only
    double delta = 0.0;
    double eta = 0.0;
    double eta_err = 0.0;
    NegativityStatus status = NegativityStatus::Converged;

    StateSpec state() const;
};

/// Runs job(i) for i < count on up to `workers` threads. Jobs must write only
/// to their own slot; the first exception is rethrown after all threads join.
template <class Job>
void run_jobs(std::size_t count, unsigned workers, Job&& job)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

struct SweepOptions {
    QuadratureSpec quadrature;
    KernelMass mass = KernelMass::PaperUnnormalized;
    unsigned workers = 1;
};

/// Rows in (delta, n) order.
std::vector<SweepRow> sweep_ho(const std::vector<int>& ns, const std::vector<double>& deltas,
                               const SweepOptions& opt = {});

/// Rows in (delta, m, m - n) order; pairs with m - n > m are skipped.
std::vector<SweepRow> sweep_offdiag(const std::vector<int>& ms, const std::vector<int>& dms,
                                    const std::vector<double>& deltas,
                                    const SweepOptions& opt = {});

/// Rows in (delta, n) order.
std::vector<SweepRow> sweep_well(const std::vector<int>& ns, const std::vector<double>& deltas,
                                 const SweepOptions& opt = {});

struct NmaxFit {
    std::vector<double> deltas;
    std::vector<int> nmax;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    /// Columns whose n_max moved by more than one step when eta was jittered
    /// within its error estimate.
    std::vector<double> fragile_deltas;
};

/// argmax of eta over n per delta column (ties go to the smaller n) and the
/// least-squares line through (delta, n_max). Throws NoInteriorMaximum when a
/// column peaks at its first or last n.
NmaxFit nmax_fit(const std::vector<SweepRow>& rows, std::uint64_t jitter_seed = 12345);

enum class WellIntegrand {
    Exact,        ///< the square-well Wigner function itself
    LeadingOrder, ///< (1/pi^2)(1 - cos 2nx) sin(2px) / p, its large-p approximation
};

std::string integrand_name(WellIntegrand w);
WellIntegrand parse_integrand(const std::string& text);

double leading_order_well(int n, double x, double p);

struct DivergenceScan {
    int n = 0;
    double p0 = 0.0;
    double p_max = 0.0;
    WellIntegrand integrand = WellIntegrand::Exact;
    std::vector<double> edges;      ///< geometric, edges[0] = p0
    std::vector<double> panel_eta;  ///< negativity of x in [0, pi], p in each panel
    std::vector<double> cumulative; ///< cumulative[k] = sum of panels below edges[k]
    double fitted_log_slope = 0.0;  ///< least squares of cumulative against ln p
    double fit_residual = 0.0;      ///< RMS residual of that fit
    bool converged = true;
};

/// Requires p0 >= 50 n and p_max >= 8 p0. panels = 0 picks base-2 panels.
DivergenceScan divergence_scan(int n, double p0, double p_max, int panels = 0,
                               WellIntegrand integrand = WellIntegrand::Exact,
                               double rel_tol = 1e-3);

struct TailScan {
    int n = 0;
    CoarseGrainSpec cg;
    double p_start = 0.0;
    std::vector<double> edges;
    std::vector<double> contributions; ///< octave [edges[k], edges[k+1]], both signs of p
    bool converged = true;

    /// contributions[k+1] / contributions[k]; 0/0 counts as 0.
    std::vector<double> ratios() const;
};

/// Requires p_start >= 50 n.
TailScan tail_convergence_scan(int n, const CoarseGrainSpec& cg, double p_start, int octaves,
                               double rel_tol = 1e-3);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// Output schemas.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);
nlohmann::json to_json(const NmaxFit& fit);
nlohmann::json to_json(const DivergenceScan& scan);
nlohmann::json to_json(const TailScan& scan);

} // namespace cgw
