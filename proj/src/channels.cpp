#include "dcfp/channels.hpp"

namespace dcfp {

const char* to_string(Channel channel) {
  switch (channel) {
    case Channel::TT: return "TT";
    case Channel::RR: return "RR";
    case Channel::RT: return "RT";
    case Channel::TR: return "TR";
  }
  return "??";
}

std::string to_string(const DetectionOutcome& outcome) {
  return std::string(to_string(outcome.channel)) + " m=" + std::to_string(outcome.offset_m);
}

} // namespace dcfp
