// Copyright 2026 The oodsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "oodsim/bus/clock.hpp"
#include "oodsim/core/error.hpp"
#include "oodsim/core/time.hpp"

namespace oodsim::bus
{

/// Delivery policy of a topic. Latest keeps only the newest unread
/// message; Queue keeps up to `capacity` and drops the oldest when full.
struct TopicPolicy
{
  enum class Mode { kLatest, kQueue };

  Mode mode = Mode::kLatest;
  std::size_t capacity = 1;

  static TopicPolicy latest() { return {Mode::kLatest, 1}; }
  static TopicPolicy queue(std::size_t capacity)
  {
    if (capacity < 1) {
      throw ValidationError("queue capacity must be >= 1");
    }
    return {Mode::kQueue, capacity};
  }

  std::size_t limit() const { return mode == Mode::kLatest ? 1 : capacity; }
};

inline constexpr std::size_t kDefaultQueueCapacity = 8;

template <typename T>
struct Envelope
{
  std::string topic;
  T payload;
  std::uint64_t seq = 0;
  Timestamp publish_ts{0};
  Timestamp capture_ts{0};
};

namespace detail
{

/// Bounded buffer applying a TopicPolicy. Not synchronized.
template <typename T>
class Inbox
{
public:
  explicit Inbox(TopicPolicy policy) : policy_(policy) {}

  void push(const Envelope<T> & env)
  {
    if (buffer_.size() == policy_.limit()) {
      buffer_.pop_front();
      ++dropped_;
    }
    buffer_.push_back(env);
  }

  std::optional<Envelope<T>> take_latest()
  {
    if (buffer_.empty()) {
      return std::nullopt;
    }
    dropped_ += buffer_.size() - 1;
    Envelope<T> env = std::move(buffer_.back());
    buffer_.clear();
    return env;
  }

  std::optional<Envelope<T>> take_next()
  {
    if (buffer_.empty()) {
      return std::nullopt;
    }
    Envelope<T> env = std::move(buffer_.front());
    buffer_.pop_front();
    return env;
  }

  std::size_t size() const { return buffer_.size(); }
  std::uint64_t dropped() const { return dropped_; }
  const std::deque<Envelope<T>> & contents() const { return buffer_; }

private:
  TopicPolicy policy_;
  std::deque<Envelope<T>> buffer_;
  std::uint64_t dropped_ = 0;
};

}  // namespace detail

template <typename T>
class Topic;

/// Per-consumer handle. Used by one task at a time; the topic may be
/// published to concurrently.
template <typename T>
class Subscriber
{
public:
  /// Newest unread envelope; older unread ones are discarded.
  std::optional<Envelope<T>> take_latest();

  /// Oldest unread envelope.
  std::optional<Envelope<T>> take_next();

  /// Blocks until a message is available, the timeout expires or stop is
  /// requested. Delivers like take_latest.
  std::optional<Envelope<T>> wait_latest(std::stop_token stop, Duration timeout);

  /// Blocking variant of take_next.
  std::optional<Envelope<T>> wait_next(std::stop_token stop, Duration timeout);

  std::size_t unread() const;
  std::uint64_t dropped() const;

  /// Sequence number of the newest unread envelope, if any.
  std::optional<std::uint64_t> newest_unread_seq() const;

private:
  friend class Topic<T>;

  Subscriber(std::shared_ptr<Topic<T>> topic, TopicPolicy policy) : topic_(std::move(topic)), inbox_(policy) {}

  template <typename Take>
  std::optional<Envelope<T>> wait_impl(std::stop_token stop, Duration timeout, Take take);

  std::shared_ptr<Topic<T>> topic_;
  detail::Inbox<T> inbox_;
};

class TopicBase
{
public:
  virtual ~TopicBase() = default;
  virtual const std::string & name() const = 0;
  virtual TopicPolicy policy() const = 0;
};

template <typename T>
class Topic final : public TopicBase, public std::enable_shared_from_this<Topic<T>>
{
public:
  Topic(std::string name, TopicPolicy policy) : name_(std::move(name)), policy_(policy), retained_(policy) {}

  const std::string & name() const override { return name_; }
  TopicPolicy policy() const override { return policy_; }

  /// Publishes with publish_ts >= capture_ts; returns the sequence number
  /// (1 for the first publish).
  std::uint64_t publish(T payload, Timestamp capture_ts, Timestamp publish_ts)
  {
    if (publish_ts < capture_ts) {
      throw OrderingError(fmt::format(
        "topic '{}': publish time {} ns precedes capture time {} ns", name_, publish_ts.count(),
        capture_ts.count()));
    }
    std::uint64_t seq = 0;
    {
      std::lock_guard lock(mutex_);
      seq = ++last_seq_;
      Envelope<T> env{name_, std::move(payload), seq, publish_ts, capture_ts};
      for (const auto & weak : subscribers_) {
        if (auto sub = weak.lock()) {
          sub->inbox_.push(env);
        }
      }
      retained_.push(env);
    }
    cv_.notify_all();
    return seq;
  }

  /// New subscriber; it starts with the messages the topic currently
  /// retains, so publishing before subscribing loses nothing.
  std::shared_ptr<Subscriber<T>> subscribe()
  {
    std::shared_ptr<Subscriber<T>> sub(new Subscriber<T>(this->shared_from_this(), policy_));
    std::lock_guard lock(mutex_);
    for (const auto & env : retained_.contents()) {
      sub->inbox_.push(env);
    }
    subscribers_.push_back(sub);
    return sub;
  }

  /// Messages retained for late subscribers.
  std::vector<Envelope<T>> retained() const
  {
    std::lock_guard lock(mutex_);
    const auto & c = retained_.contents();
    return {c.begin(), c.end()};
  }

  /// Messages evicted from the retained store by the policy.
  std::uint64_t dropped() const
  {
    std::lock_guard lock(mutex_);
    return retained_.dropped();
  }

  std::uint64_t last_seq() const
  {
    std::lock_guard lock(mutex_);
    return last_seq_;
  }

private:
  friend class Subscriber<T>;

  std::string name_;
  TopicPolicy policy_;
  mutable std::mutex mutex_;
  std::condition_variable_any cv_;
  std::uint64_t last_seq_ = 0;
  detail::Inbox<T> retained_;
  std::vector<std::weak_ptr<Subscriber<T>>> subscribers_;
};

template <typename T>
std::optional<Envelope<T>> Subscriber<T>::take_latest()
{
  std::lock_guard lock(topic_->mutex_);
  return inbox_.take_latest();
}

template <typename T>
std::optional<Envelope<T>> Subscriber<T>::take_next()
{
  std::lock_guard lock(topic_->mutex_);
  return inbox_.take_next();
}

template <typename T>
template <typename Take>
std::optional<Envelope<T>> Subscriber<T>::wait_impl(std::stop_token stop, Duration timeout, Take take)
{
  std::unique_lock lock(topic_->mutex_);
  topic_->cv_.wait_for(lock, stop, timeout, [this] { return inbox_.size() > 0; });
  return take(inbox_);
}

template <typename T>
std::optional<Envelope<T>> Subscriber<T>::wait_latest(std::stop_token stop, Duration timeout)
{
  return wait_impl(std::move(stop), timeout, [](detail::Inbox<T> & in) { return in.take_latest(); });
}

template <typename T>
std::optional<Envelope<T>> Subscriber<T>::wait_next(std::stop_token stop, Duration timeout)
{
  return wait_impl(std::move(stop), timeout, [](detail::Inbox<T> & in) { return in.take_next(); });
}

template <typename T>
std::size_t Subscriber<T>::unread() const
{
  std::lock_guard lock(topic_->mutex_);
  return inbox_.size();
}

template <typename T>
std::uint64_t Subscriber<T>::dropped() const
{
  std::lock_guard lock(topic_->mutex_);
  return inbox_.dropped();
}

template <typename T>
std::optional<std::uint64_t> Subscriber<T>::newest_unread_seq() const
{
  std::lock_guard lock(topic_->mutex_);
  if (inbox_.size() == 0) {
    return std::nullopt;
  }
  return inbox_.contents().back().seq;
}

/// Registry of named topics sharing one clock for publish timestamps.
class Bus
{
public:
  explicit Bus(const Clock & clock) : clock_(clock) {}

  const Clock & clock() const { return clock_; }

  template <typename T>
  std::shared_ptr<Topic<T>> create_topic(const std::string & name, TopicPolicy policy)
  {
    std::lock_guard lock(mutex_);
    if (topics_.count(name) != 0) {
      throw ValidationError(fmt::format("topic '{}' already exists", name));
    }
    auto topic = std::make_shared<Topic<T>>(name, policy);
    topics_.emplace(name, topic);
    return topic;
  }

  template <typename T>
  std::shared_ptr<Topic<T>> topic(const std::string & name) const
  {
    std::lock_guard lock(mutex_);
    const auto it = topics_.find(name);
    if (it == topics_.end()) {
      throw ValidationError(fmt::format("unknown topic '{}'", name));
    }
    auto typed = std::dynamic_pointer_cast<Topic<T>>(it->second);
    if (!typed) {
      throw ValidationError(fmt::format("topic '{}' carries a different payload type", name));
    }
    return typed;
  }

  /// Publishes stamped with the bus clock.
  template <typename T>
  std::uint64_t publish(const std::string & name, T payload, Timestamp capture_ts)
  {
    return topic<T>(name)->publish(std::move(payload), capture_ts, clock_.now());
  }

  template <typename T>
  std::shared_ptr<Subscriber<T>> subscribe(const std::string & name)
  {
    return topic<T>(name)->subscribe();
  }

  bool has_topic(const std::string & name) const
  {
    std::lock_guard lock(mutex_);
    return topics_.count(name) != 0;
  }

  std::vector<std::string> topic_names() const
  {
    std::lock_guard lock(mutex_);
    std::vector<std::string> names;
    for (const auto & [name, _] : topics_) {
      names.push_back(name);
    }
    return names;
  }

private:
  const Clock & clock_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<TopicBase>> topics_;
};

}  // namespace oodsim::bus
