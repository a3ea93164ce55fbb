#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace mutrans::detail {

// FFTW planning is not thread safe; execution on distinct data is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class PlanCache {
public:
    ~PlanCache() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        for (auto& kv : c2c_) fftw_destroy_plan(kv.second);
        for (auto& kv : r2r_) fftw_destroy_plan(kv.second);
    }

    fftw_plan c2c(std::size_t n, int sign) {
        auto key = std::make_pair(n, sign);
        auto it = c2c_.find(key);
        if (it != c2c_.end()) return it->second;
        std::vector<std::complex<double>> buf(n);
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            plan = fftw_plan_dft_1d(int(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        }
        c2c_.emplace(key, plan);
        return plan;
    }

    fftw_plan dst1(std::size_t n) {
        auto it = r2r_.find(n);
        if (it != r2r_.end()) return it->second;
        std::vector<double> buf(n);
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            plan = fftw_plan_r2r_1d(int(n), buf.data(), buf.data(), FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
        }
        r2r_.emplace(n, plan);
        return plan;
    }

private:
    std::map<std::pair<std::size_t, int>, fftw_plan> c2c_;
    std::map<std::size_t, fftw_plan> r2r_;
};

inline PlanCache& plans() {
    thread_local PlanCache cache;
    return cache;
}

/// Unnormalized in-place DFT; sign = FFTW_FORWARD (e^{-i}) or FFTW_BACKWARD.
inline void dft(std::vector<std::complex<double>>& v, int sign) {
    fftw_plan p = plans().c2c(v.size(), sign);
    auto* d = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(p, d, d);
}

/// Unnormalized in-place DST-I: y_k = 2 sum_j x_j sin(pi (j+1)(k+1)/(n+1)).
inline void dst1(std::vector<double>& v) {
    fftw_plan p = plans().dst1(v.size());
    fftw_execute_r2r(p, v.data(), v.data());
}

}  // namespace mutrans::detail
