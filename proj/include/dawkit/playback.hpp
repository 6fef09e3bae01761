#pragma once

#include <memory>

#include "dawkit/processor.hpp"

namespace dawkit {

// Clip playback kinds. `playback` plays the raw source at a fixed transpose
// rate from a timeline position; `playback_warp` follows the clip's warp
// markers at the engine tempo. Both prerender their full timeline at prepare
// so block size can never change the output.
std::unique_ptr<Processor> make_playback_processor();
std::unique_ptr<Processor> make_playback_warp_processor();
ParamSchema playback_schema();
ParamSchema playback_warp_schema();

} // namespace dawkit
