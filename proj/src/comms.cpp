#include "swarmsim/comms.hpp"

#include <algorithm>
#include <utility>

namespace swarmsim {

std::vector<Message> BroadcastBus::deliver(std::vector<std::vector<Message>>& inboxes) {
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const Message& a, const Message& b) { return a.sender < b.sender; });
    for (const Message& msg : pending_) {
        for (std::size_t robot = 0; robot < inboxes.size(); ++robot) {
            if (static_cast<int>(robot) == msg.sender) continue;
            inboxes[robot].push_back(msg);
        }
    }
    return std::exchange(pending_, {});
}

}  // namespace swarmsim
