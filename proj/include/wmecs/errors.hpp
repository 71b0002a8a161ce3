#pragma once

#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmecs {

/// Invalid user-supplied parameters (out-of-range angles, negative couplings, bad cutoffs).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree (operator dimension vs. mode cutoff, state vs. state).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Hard numerical fault: the truncated space cannot represent the requested operation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Post-selection projected onto (numerically) the zero vector.
class DegeneratePostSelection : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct TruncationWarning {
    std::string where;
    double tail_mass = 0.0;
};

// Collects soft truncation warnings. Library calls take an optional pointer to one;
// a null sink drops the warnings.
class WarningSink {
public:
    void add(TruncationWarning w) {
        std::lock_guard lock(mutex_);
        warnings_.push_back(std::move(w));
    }
    void merge(const WarningSink& other) {
        auto copy = other.warnings();
        std::lock_guard lock(mutex_);
        warnings_.insert(warnings_.end(), copy.begin(), copy.end());
    }
    std::vector<TruncationWarning> warnings() const {
        std::lock_guard lock(mutex_);
        return warnings_;
    }
    std::size_t count() const {
        std::lock_guard lock(mutex_);
        return warnings_.size();
    }

private:
    mutable std::mutex mutex_;
    std::vector<TruncationWarning> warnings_;
};

inline void warn(WarningSink* sink, std::string where, double tail_mass) {
    if (sink != nullptr) sink->add({std::move(where), tail_mass});
}

} // namespace wmecs
