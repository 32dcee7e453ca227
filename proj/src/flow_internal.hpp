#pragma once

// Internal to the library: the single-precision variant of the flow engine
// used by the streaming pipeline. Same algorithm as PyramidFlowEngine with
// float planes inside; outputs are cast to the double FlowField at the end.

#include <memory>
#include <optional>

#include "aquaflow/flow.hpp"

namespace aquaflow::detail {

class StreamingFlowEngine {
public:
    StreamingFlowEngine(ExpansionParams eparams, FlowParams fparams);
    ~StreamingFlowEngine();
    StreamingFlowEngine(StreamingFlowEngine&&) noexcept;
    StreamingFlowEngine& operator=(StreamingFlowEngine&&) noexcept;

    void reset();
    std::optional<FlowField> push(const ScalarField& frame);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace aquaflow::detail
