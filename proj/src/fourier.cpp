#include "dkdv/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace dkdv::fourier {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct Plan1D {
    fftw_plan plan = nullptr;
    fftw_complex* buf = nullptr;
    std::int64_t n = 0;

    Plan1D(std::int64_t n_, int sign) : n(n_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buf = fftw_alloc_complex(static_cast<size_t>(n));
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE);
    }
    ~Plan1D() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(buf);
    }
    Plan1D(const Plan1D&) = delete;
    Plan1D& operator=(const Plan1D&) = delete;
};

struct Plan2D {
    fftw_plan plan = nullptr;
    fftw_complex* buf = nullptr;
    std::int64_t nr = 0, nc = 0;

    Plan2D(std::int64_t nr_, std::int64_t nc_, int sign) : nr(nr_), nc(nc_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buf = fftw_alloc_complex(static_cast<size_t>(nr * nc));
        plan = fftw_plan_dft_2d(static_cast<int>(nr), static_cast<int>(nc), buf, buf, sign,
                                FFTW_ESTIMATE);
    }
    ~Plan2D() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(buf);
    }
    Plan2D(const Plan2D&) = delete;
    Plan2D& operator=(const Plan2D&) = delete;
};

Plan1D& plan_1d(std::int64_t n, int sign) {
    thread_local std::map<std::pair<std::int64_t, int>, std::unique_ptr<Plan1D>> cache;
    auto& slot = cache[{n, sign}];
    if (!slot) slot = std::make_unique<Plan1D>(n, sign);
    return *slot;
}

Plan2D& plan_2d(std::int64_t nr, std::int64_t nc, int sign) {
    thread_local std::map<std::tuple<std::int64_t, std::int64_t, int>, std::unique_ptr<Plan2D>> cache;
    auto& slot = cache[{nr, nc, sign}];
    if (!slot) slot = std::make_unique<Plan2D>(nr, nc, sign);
    return *slot;
}

// mode-ascending slot i <-> fftw slot (i + n/2) % n
inline std::int64_t fftw_slot(std::int64_t i, std::int64_t n) { return (i + n / 2) % n; }

}  // namespace

std::vector<cplx> forward_1d(const std::vector<cplx>& in) {
    const std::int64_t n = static_cast<std::int64_t>(in.size());
    auto& p = plan_1d(n, FFTW_FORWARD);
    for (std::int64_t j = 0; j < n; ++j) {
        p.buf[j][0] = in[j].real();
        p.buf[j][1] = in[j].imag();
    }
    fftw_execute(p.plan);
    std::vector<cplx> out(n);
    for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t f = fftw_slot(i, n);
        out[i] = cplx(p.buf[f][0], p.buf[f][1]);
    }
    return out;
}

std::vector<cplx> inverse_1d(const std::vector<cplx>& in) {
    const std::int64_t n = static_cast<std::int64_t>(in.size());
    auto& p = plan_1d(n, FFTW_BACKWARD);
    for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t f = fftw_slot(i, n);
        p.buf[f][0] = in[i].real();
        p.buf[f][1] = in[i].imag();
    }
    fftw_execute(p.plan);
    std::vector<cplx> out(n);
    for (std::int64_t j = 0; j < n; ++j) out[j] = cplx(p.buf[j][0], p.buf[j][1]);
    return out;
}

std::vector<cplx> forward_2d(std::int64_t nr, std::int64_t nc, const std::vector<cplx>& in) {
    if (static_cast<std::int64_t>(in.size()) != nr * nc)
        throw std::invalid_argument("forward_2d: size mismatch");
    auto& p = plan_2d(nr, nc, FFTW_FORWARD);
    for (std::int64_t j = 0; j < nr * nc; ++j) {
        p.buf[j][0] = in[j].real();
        p.buf[j][1] = in[j].imag();
    }
    fftw_execute(p.plan);
    std::vector<cplx> out(static_cast<size_t>(nr * nc));
    for (std::int64_t r = 0; r < nr; ++r) {
        std::int64_t fr = fftw_slot(r, nr);
        for (std::int64_t c = 0; c < nc; ++c) {
            std::int64_t fc = fftw_slot(c, nc);
            out[r * nc + c] = cplx(p.buf[fr * nc + fc][0], p.buf[fr * nc + fc][1]);
        }
    }
    return out;
}

std::vector<cplx> inverse_2d(std::int64_t nr, std::int64_t nc, const std::vector<cplx>& in) {
    if (static_cast<std::int64_t>(in.size()) != nr * nc)
        throw std::invalid_argument("inverse_2d: size mismatch");
    auto& p = plan_2d(nr, nc, FFTW_BACKWARD);
    for (std::int64_t r = 0; r < nr; ++r) {
        std::int64_t fr = fftw_slot(r, nr);
        for (std::int64_t c = 0; c < nc; ++c) {
            std::int64_t fc = fftw_slot(c, nc);
            p.buf[fr * nc + fc][0] = in[r * nc + c].real();
            p.buf[fr * nc + fc][1] = in[r * nc + c].imag();
        }
    }
    fftw_execute(p.plan);
    std::vector<cplx> out(static_cast<size_t>(nr * nc));
    for (std::int64_t j = 0; j < nr * nc; ++j) out[j] = cplx(p.buf[j][0], p.buf[j][1]);
    return out;
}

}  // namespace dkdv::fourier
