#include "resonance/error.hpp"

namespace resonance {

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace resonance
