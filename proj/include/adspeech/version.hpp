#pragma once

namespace adspeech {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace adspeech
