#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lvggm.h"

namespace cli {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void check(lvggm_status st, const std::string& what) {
    if (st != LVGGM_OK) throw CliError(what + ": " + lvggm_last_error());
}

template <typename T, void (*FreeFn)(T*)>
class Handle {
public:
    Handle() = default;
    explicit Handle(T* ptr) : ptr_(ptr) {}
    Handle(Handle&& other) noexcept : ptr_(other.ptr_) { other.ptr_ = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        if (this != &other) {
            reset();
            ptr_ = other.ptr_;
            other.ptr_ = nullptr;
        }
        return *this;
    }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { reset(); }

    T* get() const { return ptr_; }
    explicit operator bool() const { return ptr_ != nullptr; }
    void reset(T* ptr = nullptr) {
        if (ptr_) FreeFn(ptr_);
        ptr_ = ptr;
    }

private:
    T* ptr_ = nullptr;
};

using Matrix = Handle<lvggm_matrix, lvggm_matrix_free>;
using Atoms = Handle<lvggm_atoms, lvggm_atoms_free>;
using Model = Handle<lvggm_model, lvggm_model_free>;
using EstimateHandle = Handle<lvggm_estimate, lvggm_estimate_free>;

inline Matrix require_matrix(lvggm_matrix* m, const std::string& what) {
    if (!m) throw CliError(what + ": " + lvggm_last_error());
    return Matrix(m);
}

inline Atoms require_atoms(lvggm_atoms* a, const std::string& what) {
    if (!a) throw CliError(what + ": " + lvggm_last_error());
    return Atoms(a);
}

inline Model require_model(lvggm_model* m, const std::string& what) {
    if (!m) throw CliError(what + ": " + lvggm_last_error());
    return Model(m);
}

inline std::vector<double> matrix_data(const Matrix& m) {
    const int p = lvggm_matrix_dim(m.get());
    std::vector<double> data(static_cast<size_t>(p) * static_cast<size_t>(p));
    check(lvggm_matrix_copy_data(m.get(), data.data()), "matrix data");
    return data;
}

inline std::vector<double> sqrt_weights(int p) {
    std::vector<double> w(static_cast<size_t>(p));
    for (int k = 1; k <= p; ++k) w[static_cast<size_t>(k - 1)] = std::sqrt(double(k));
    return w;
}

// splitmix64 of (base, index): independent per-cell streams
inline uint64_t cell_seed(uint64_t base, uint64_t index) {
    uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace cli
