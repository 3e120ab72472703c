#pragma once

#include "collab/gen/mock_provider.hpp"

namespace collab::agent {

// Installs a stateless agent_step/synthesis script on the mock so the offline
// chat works end to end: search first, then fetch every offered artifact of the
// top two hits, then finish. The synthesis names the discussions found, the
// strongest assessed dimension of each, and cites every fetched artifact.
void install_demo_agent_script(gen::MockProvider& mock);

}  // namespace collab::agent
