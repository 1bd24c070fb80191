#include "signgad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace signgad {

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& row_ids) {
    Matrix out(row_ids.size(), m.cols);
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        const auto src = m.row(row_ids[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) {
        throw std::invalid_argument("hconcat: row count mismatch");
    }
    Matrix out(a.rows, a.cols + b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        auto dst = out.row(r);
        const auto ra = a.row(r);
        const auto rb = b.row(r);
        std::copy(ra.begin(), ra.end(), dst.begin());
        std::copy(rb.begin(), rb.end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols));
    }
    return out;
}

bool solve_spd(const Matrix& a, const std::vector<double>& b, std::vector<double>& x) {
    const std::size_t n = a.rows;
    if (a.cols != n || b.size() != n) {
        throw std::invalid_argument("solve_spd: shape mismatch");
    }
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l.at(i, k) * l.at(j, k);
            }
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) {
                    return false;
                }
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    // Forward then backward substitution.
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= l.at(i, k) * y[k];
        }
        y[i] = s / l.at(i, i);
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) {
            s -= l.at(k, ii) * x[k];
        }
        x[ii] = s / l.at(ii, ii);
    }
    return true;
}

void symmetric_eigen(const Matrix& a, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
    const std::size_t n = a.rows;
    if (a.cols != n) {
        throw std::invalid_argument("symmetric_eigen: matrix not square");
    }
    Matrix d = a;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        v.at(i, i) = 1.0;
    }

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += d.at(p, q) * d.at(p, q);
            }
        }
        if (off < 1e-24 * (n > 0 ? static_cast<double>(n * n) : 1.0)) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = d.at(p, q);
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                const double app = d.at(p, p);
                const double aqq = d.at(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double dkp = d.at(k, p);
                    const double dkq = d.at(k, q);
                    d.at(k, p) = c * dkp - s * dkq;
                    d.at(k, q) = s * dkp + c * dkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double dpk = d.at(p, k);
                    const double dqk = d.at(q, k);
                    d.at(p, k) = c * dpk - s * dqk;
                    d.at(q, k) = s * dpk + c * dqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v.at(k, p);
                    const double vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (d.at(i, i) != d.at(j, j)) {
            return d.at(i, i) > d.at(j, j);
        }
        return i < j;
    });
    eigenvalues.assign(n, 0.0);
    eigenvectors = Matrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        eigenvalues[c] = d.at(order[c], order[c]);
        for (std::size_t r = 0; r < n; ++r) {
            eigenvectors.at(r, c) = v.at(r, order[c]);
        }
    }
}

Matrix principal_basis(const Matrix& x, std::size_t rank, std::size_t* effective_rank) {
    const std::size_t d = x.cols;
    Matrix gram(d, d);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto row = x.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = row[i];
            if (xi == 0.0) {
                continue;
            }
            for (std::size_t j = i; j < d; ++j) {
                gram.at(i, j) += xi * row[j];
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            gram.at(i, j) = gram.at(j, i);
        }
    }

    std::vector<double> eigenvalues;
    Matrix eigenvectors;
    symmetric_eigen(gram, eigenvalues, eigenvectors);

    const std::size_t want = std::min(rank, d);
    const double top = eigenvalues.empty() ? 0.0 : std::max(eigenvalues[0], 0.0);
    const double tol = top * 1e-10;
    Matrix basis(d, rank);
    std::size_t kept = 0;
    for (std::size_t c = 0; c < want; ++c) {
        if (!(eigenvalues[c] > tol) || !(eigenvalues[c] > 0.0)) {
            break;
        }
        // Canonical sign: largest-|coordinate| entry made positive.
        std::size_t arg = 0;
        for (std::size_t r = 1; r < d; ++r) {
            if (std::abs(eigenvectors.at(r, c)) > std::abs(eigenvectors.at(arg, c))) {
                arg = r;
            }
        }
        const double sign = eigenvectors.at(arg, c) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < d; ++r) {
            basis.at(r, kept) = sign * eigenvectors.at(r, c);
        }
        ++kept;
    }
    if (effective_rank != nullptr) {
        *effective_rank = kept;
    }
    return basis;
}

} // namespace signgad
