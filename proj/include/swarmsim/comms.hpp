#pragma once

#include <cstdint>
#include <vector>

#include "swarmsim/inference.hpp"

namespace swarmsim {

enum class MessageKind : std::uint8_t { Observation, Decision };

struct Message {
    int sender = -1;
    int color_bit = 0;
    MessageKind kind = MessageKind::Observation;
    std::int64_t t_emit = 0;
};

struct FeedbackMode {
    bool positive_feedback = false;  // u+ broadcasts the decision once one exists
};

struct Payload {
    int color_bit = 0;
    MessageKind kind = MessageKind::Observation;
};

// Under positive feedback a decided robot sends its decision bit; everyone
// else sends the most recent observation. Receivers treat both identically,
// the kind is diagnostic only.
inline Payload compose_broadcast(Decision d_f, int last_color, FeedbackMode mode) {
    if (mode.positive_feedback && d_f != Decision::Undecided) {
        return Payload{static_cast<int>(d_f), MessageKind::Decision};
    }
    return Payload{last_color, MessageKind::Observation};
}

// Ideal broadcast medium: zero latency, zero loss, infinite range. Messages
// emitted in one step are delivered the same step to every other robot, in
// ascending sender id.
class BroadcastBus {
public:
    void emit(int sender, Payload payload, std::int64_t step) {
        pending_.push_back(Message{sender, payload.color_bit, payload.kind, step});
    }

    // Appends this step's messages to every inbox except the sender's own,
    // ordered by sender id. Returns the delivered messages in that order and
    // clears the pending queue.
    std::vector<Message> deliver(std::vector<std::vector<Message>>& inboxes);

    bool empty() const { return pending_.empty(); }
    const std::vector<Message>& pending() const { return pending_; }

private:
    std::vector<Message> pending_;
};

}  // namespace swarmsim
