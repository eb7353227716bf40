// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace mimosim {

using Complex = std::complex<double>;

/// Dense complex vector (beamforming weights, array responses).
class ComplexVector {
public:
    ComplexVector() = default;
    explicit ComplexVector(std::size_t size, Complex fill = {}) : data_(size, fill) {}
    ComplexVector(std::initializer_list<Complex> values) : data_(values) {}
    explicit ComplexVector(std::vector<Complex> values) : data_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    void resize(std::size_t n) { data_.resize(n); }

    Complex& operator[](std::size_t i) noexcept { return data_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return data_[i]; }

    [[nodiscard]] double norm() const noexcept
    {
        double acc = 0.0;
        for (const auto& v : data_) {
            acc += std::norm(v);
        }
        return std::sqrt(acc);
    }

    [[nodiscard]] std::span<const Complex> values() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> values() noexcept { return data_; }
    [[nodiscard]] const Complex* data() const noexcept { return data_.data(); }

    friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

private:
    std::vector<Complex> data_;
};

/// Non-owning row-major view of one U x S channel matrix.
struct ConstMatrixView {
    const Complex* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    [[nodiscard]] const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
};

/// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill = {}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static ComplexMatrix identity(std::size_t n)
    {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    void resize(std::size_t rows, std::size_t cols)
    {
        rows_ = rows;
        cols_ = cols;
        data_.assign(rows * cols, Complex{});
    }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    Complex& at(std::size_t r, std::size_t c)
    {
        check(r, c);
        return (*this)(r, c);
    }
    [[nodiscard]] const Complex& at(std::size_t r, std::size_t c) const
    {
        check(r, c);
        return (*this)(r, c);
    }

    [[nodiscard]] ConstMatrixView view() const noexcept { return {data_.data(), rows_, cols_}; }
    operator ConstMatrixView() const noexcept { return view(); }  // NOLINT(google-explicit-constructor)

    [[nodiscard]] std::span<const Complex> values() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> values() noexcept { return data_; }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    void check(std::size_t r, std::size_t c) const
    {
        if (r >= rows_ || c >= cols_) {
            throw std::out_of_range("matrix index (" + std::to_string(r) + ", " + std::to_string(c) + ") outside " +
                                    std::to_string(rows_) + "x" + std::to_string(cols_));
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Stack of N equally-sized channel matrices (one page per cluster), page-major storage.
class ComplexTensor3 {
public:
    ComplexTensor3() = default;
    ComplexTensor3(std::size_t rows, std::size_t cols, std::size_t pages)
        : rows_(rows), cols_(cols), pages_(pages), data_(rows * cols * pages)
    {
    }

    /// Builds a tensor from matrices; all must share one shape.
    static ComplexTensor3 from_pages(const std::vector<ComplexMatrix>& pages)
    {
        if (pages.empty()) {
            return {};
        }
        ComplexTensor3 t(pages.front().rows(), pages.front().cols(), pages.size());
        for (std::size_t n = 0; n < pages.size(); ++n) {
            if (pages[n].rows() != t.rows_ || pages[n].cols() != t.cols_) {
                throw DimensionError("page " + std::to_string(n) + " is " + std::to_string(pages[n].rows()) + "x" +
                                     std::to_string(pages[n].cols()) + ", expected " + std::to_string(t.rows_) + "x" +
                                     std::to_string(t.cols_));
            }
            std::copy(pages[n].values().begin(), pages[n].values().end(), t.page_data(n));
        }
        return t;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t pages() const noexcept { return pages_; }

    Complex& operator()(std::size_t r, std::size_t c, std::size_t n) noexcept { return data_[(n * rows_ + r) * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c, std::size_t n) const noexcept
    {
        return data_[(n * rows_ + r) * cols_ + c];
    }

    [[nodiscard]] ConstMatrixView page(std::size_t n) const noexcept { return {data_.data() + n * rows_ * cols_, rows_, cols_}; }
    Complex* page_data(std::size_t n) noexcept { return data_.data() + n * rows_ * cols_; }

    [[nodiscard]] std::span<const Complex> values() const noexcept { return data_; }

    friend bool operator==(const ComplexTensor3&, const ComplexTensor3&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t pages_ = 0;
    std::vector<Complex> data_;
};

/// Kernel behind the quadratic form: plain loops or the Eigen-backed path.
enum class Kernel { reference, optimized };

namespace detail {

inline void check_conforming(std::size_t left, ConstMatrixView h, std::size_t right, const char* where)
{
    if (left != h.rows || right != h.cols) {
        throw DimensionError(std::string(where) + ": w_left has " + std::to_string(left) + " entries, H is " +
                             std::to_string(h.rows) + "x" + std::to_string(h.cols) + ", w_right has " +
                             std::to_string(right) + " entries");
    }
}

inline Complex quadratic_form_loops(const Complex* left, ConstMatrixView h, const Complex* right) noexcept
{
    Complex acc{};
    for (std::size_t u = 0; u < h.rows; ++u) {
        for (std::size_t s = 0; s < h.cols; ++s) {
            acc += left[u] * h(u, s) * right[s];
        }
    }
    return acc;
}

inline Complex quadratic_form_eigen(const Complex* left, ConstMatrixView h, const Complex* right) noexcept
{
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto rows = static_cast<Eigen::Index>(h.rows);
    const auto cols = static_cast<Eigen::Index>(h.cols);
    const Eigen::Map<const RowMajor> hm(h.data, rows, cols);
    const Eigen::Map<const Eigen::VectorXcd> wl(left, rows);
    const Eigen::Map<const Eigen::VectorXcd> wr(right, cols);
    return wl.transpose() * (hm * wr);
}

}  // namespace detail

/**
 * w_left^T H w_right = sum_u sum_s w_left[u] H[u,s] w_right[s].
 *
 * Plain transposes on both sides: no conjugation is applied here, callers
 * conjugate steering vectors themselves.
 */
inline Complex quadratic_form(const ComplexVector& w_left, ConstMatrixView h, const ComplexVector& w_right,
                              Kernel kernel = Kernel::optimized)
{
    detail::check_conforming(w_left.size(), h, w_right.size(), "quadratic_form");
    return kernel == Kernel::reference ? detail::quadratic_form_loops(w_left.data(), h, w_right.data())
                                       : detail::quadratic_form_eigen(w_left.data(), h, w_right.data());
}

/// Per-page quadratic form; entry n equals quadratic_form(w_left, page n, w_right).
inline ComplexVector tensor_quadratic_form(const ComplexVector& w_left, const ComplexTensor3& h3, const ComplexVector& w_right,
                                           Kernel kernel = Kernel::optimized)
{
    ComplexVector out(h3.pages());
    for (std::size_t n = 0; n < h3.pages(); ++n) {
        const auto page = h3.page(n);
        if (w_left.size() != page.rows || w_right.size() != page.cols) {
            throw DimensionError("tensor_quadratic_form: page " + std::to_string(n) + " is " + std::to_string(page.rows) +
                                 "x" + std::to_string(page.cols) + ", weights are " + std::to_string(w_left.size()) +
                                 " and " + std::to_string(w_right.size()));
        }
        out[n] = quadratic_form(w_left, page, w_right, kernel);
    }
    return out;
}

// Plain-text fixture format: "rows cols pages" then one "re im" line per entry in storage order.

inline void write_text(std::ostream& os, const ComplexTensor3& t)
{
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    os << t.rows() << ' ' << t.cols() << ' ' << t.pages() << '\n';
    for (const auto& v : t.values()) {
        os << v.real() << ' ' << v.imag() << '\n';
    }
    os.precision(old_precision);
}

inline void write_text(std::ostream& os, const ComplexMatrix& m)
{
    ComplexTensor3 t(m.rows(), m.cols(), 1);
    std::copy(m.values().begin(), m.values().end(), t.page_data(0));
    write_text(os, t);
}

inline ComplexTensor3 read_tensor_text(std::istream& is)
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t pages = 0;
    if (!(is >> rows >> cols >> pages)) {
        throw ConfigError("tensor text: missing 'rows cols pages' header");
    }
    ComplexTensor3 t(rows, cols, pages);
    for (std::size_t n = 0; n < pages; ++n) {
        Complex* p = t.page_data(n);
        for (std::size_t i = 0; i < rows * cols; ++i) {
            double re = 0.0;
            double im = 0.0;
            if (!(is >> re >> im)) {
                throw ConfigError("tensor text: truncated after " + std::to_string(n * rows * cols + i) + " entries");
            }
            p[i] = {re, im};
        }
    }
    return t;
}

inline ComplexMatrix read_matrix_text(std::istream& is)
{
    const auto t = read_tensor_text(is);
    if (t.pages() != 1) {
        throw ConfigError("matrix text: expected 1 page, found " + std::to_string(t.pages()));
    }
    ComplexMatrix m(t.rows(), t.cols());
    std::copy(t.values().begin(), t.values().end(), m.values().begin());
    return m;
}

}  // namespace mimosim
