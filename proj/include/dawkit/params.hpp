#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dawkit/errors.hpp"

namespace dawkit {

/// A sample-rate sequence automating one named parameter.
struct ControlSignal {
    std::vector<double> values;
    bool hold_last = true;
};

struct ParamSpec {
    std::string name;
    double def = 0.0;
    double min = 0.0;
    double max = 1.0;
    bool automatable = true;
};

/// Ordered parameter schema of one processor kind instance. Scalar sets are
/// range-checked; automation samples are clamped per frame instead.
class ParamSchema {
public:
    ParamSchema() = default;
    explicit ParamSchema(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {}

    const std::vector<ParamSpec>& specs() const { return specs_; }
    size_t size() const { return specs_.size(); }

    int index_of(const std::string& name) const {
        for (size_t i = 0; i < specs_.size(); ++i)
            if (specs_[i].name == name)
                return static_cast<int>(i);
        return -1;
    }

    const ParamSpec& at(int index) const { return specs_[static_cast<size_t>(index)]; }

private:
    std::vector<ParamSpec> specs_;
};

/// Per-render view of one node's parameters. Resolves the effective value of
/// each parameter at an absolute frame index: an automation signal overrides
/// the scalar; past the end the signal holds its last value when hold_last,
/// otherwise the scalar takes over. Automation samples are clamped to the
/// schema range per frame.
class ParamResolver {
public:
    void reset(const ParamSchema* schema) {
        schema_ = schema;
        scalars_.assign(schema->size(), 0.0);
        for (size_t i = 0; i < schema->size(); ++i)
            scalars_[i] = schema->at(static_cast<int>(i)).def;
        signals_.assign(schema->size(), nullptr);
    }

    void set_scalar(int index, double value) { scalars_[static_cast<size_t>(index)] = value; }
    void set_signal(int index, const ControlSignal* signal) {
        signals_[static_cast<size_t>(index)] = signal;
    }

    double scalar(int index) const { return scalars_[static_cast<size_t>(index)]; }

    bool automated(int index) const { return signals_[static_cast<size_t>(index)] != nullptr; }

    /// Effective value at absolute frame n.
    double get(int index, int64_t n) const {
        const ControlSignal* sig = signals_[static_cast<size_t>(index)];
        if (!sig)
            return scalars_[static_cast<size_t>(index)];
        const int64_t len = static_cast<int64_t>(sig->values.size());
        double v;
        if (n < len) {
            v = sig->values[static_cast<size_t>(n)];
        } else if (sig->hold_last) {
            v = sig->values[static_cast<size_t>(len - 1)];
        } else {
            return scalars_[static_cast<size_t>(index)];
        }
        const ParamSpec& spec = schema_->at(index);
        if (v < spec.min) v = spec.min;
        if (v > spec.max) v = spec.max;
        return v;
    }

private:
    const ParamSchema* schema_ = nullptr;
    std::vector<double> scalars_;
    std::vector<const ControlSignal*> signals_;
};

} // namespace dawkit
