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

#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <thread>

#include "oodsim/bus/bus.hpp"
#include "oodsim/bus/clock.hpp"
#include "oodsim/bus/stage_log.hpp"
#include "oodsim/core/error.hpp"

namespace oodsim::bus
{
namespace
{

using namespace std::chrono_literals;

TEST(Bus, CreateTopicRejectsDuplicates)
{
  VirtualClock clock;
  Bus bus(clock);
  EXPECT_NO_THROW(bus.create_topic<int>("camera", TopicPolicy::latest()));
  EXPECT_THROW(bus.create_topic<int>("camera", TopicPolicy::latest()), ValidationError);
  EXPECT_NO_THROW(bus.create_topic<int>("estop", TopicPolicy::queue(8)));
  EXPECT_EQ(bus.topic<int>("estop")->policy().limit(), 8u);
  EXPECT_THROW(TopicPolicy::queue(0), ValidationError);
}

TEST(Bus, UnknownTopicOrWrongTypeRejected)
{
  VirtualClock clock;
  Bus bus(clock);
  bus.create_topic<int>("a", TopicPolicy::latest());
  EXPECT_THROW(bus.publish<int>("b", 1, Timestamp{0}), ValidationError);
  EXPECT_THROW(bus.topic<double>("a"), ValidationError);
}

TEST(Bus, PublishBeforeSubscribeIsRetained)
{
  VirtualClock clock;
  Bus bus(clock);
  bus.create_topic<int>("q", TopicPolicy::queue(4));
  bus.publish<int>("q", 10, Timestamp{0});
  bus.publish<int>("q", 11, Timestamp{0});
  auto sub = bus.subscribe<int>("q");
  EXPECT_EQ(sub->take_next()->payload, 10);
  EXPECT_EQ(sub->take_next()->payload, 11);
  EXPECT_FALSE(sub->take_next());
}

TEST(Bus, LatestConflates)
{
  VirtualClock clock;
  Bus bus(clock);
  auto topic = bus.create_topic<int>("camera", TopicPolicy::latest());
  auto sub = topic->subscribe();
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(topic->publish(i, Timestamp{0}, Timestamp{0}), static_cast<std::uint64_t>(i));
  }
  ASSERT_EQ(topic->retained().size(), 1u);
  EXPECT_EQ(topic->retained()[0].seq, 3u);
  EXPECT_EQ(sub->unread(), 1u);
  const auto env = sub->take_latest();
  ASSERT_TRUE(env);
  EXPECT_EQ(env->seq, 3u);
  EXPECT_EQ(env->payload, 3);
  EXPECT_FALSE(sub->take_latest());
}

TEST(Bus, QueueDropsOldest)
{
  VirtualClock clock;
  Bus bus(clock);
  auto topic = bus.create_topic<int>("q", TopicPolicy::queue(2));
  auto sub = topic->subscribe();
  for (int i = 1; i <= 3; ++i) {
    topic->publish(i, Timestamp{0}, Timestamp{0});
  }
  EXPECT_EQ(topic->dropped(), 1u);
  EXPECT_EQ(sub->dropped(), 1u);
  EXPECT_EQ(sub->take_next()->seq, 2u);
  EXPECT_EQ(sub->take_next()->seq, 3u);
}

TEST(Bus, EmptyTopicYieldsNothing)
{
  VirtualClock clock;
  Bus bus(clock);
  auto sub = bus.create_topic<int>("x", TopicPolicy::latest())->subscribe();
  EXPECT_FALSE(sub->take_latest());
  EXPECT_FALSE(sub->newest_unread_seq());
}

TEST(Bus, PublishBeforeCaptureIsOrderingError)
{
  auto topic = std::make_shared<Topic<int>>("t", TopicPolicy::latest());
  EXPECT_THROW(topic->publish(1, Timestamp{10}, Timestamp{5}), OrderingError);
}

TEST(Bus, EnvelopeCarriesTimestamps)
{
  VirtualClock clock(Timestamp{500});
  Bus bus(clock);
  bus.create_topic<int>("t", TopicPolicy::latest());
  auto sub = bus.subscribe<int>("t");
  bus.publish<int>("t", 7, Timestamp{200});
  const auto env = sub->take_latest();
  EXPECT_EQ(env->topic, "t");
  EXPECT_EQ(env->capture_ts, Timestamp{200});
  EXPECT_EQ(env->publish_ts, Timestamp{500});
}

// Discrete-event trace: 30 Hz producer, consumer busy 200 ms per item, run
// against the bus on a virtual clock.
TEST(Bus, BusyConsumerTakesNewestWithGaps)
{
  VirtualClock clock;
  Bus bus(clock);
  auto topic = bus.create_topic<int>("camera", TopicPolicy::latest());
  auto sub = topic->subscribe();
  const std::int64_t period = 33'333'333;
  const std::int64_t busy = 200'000'000;
  std::int64_t next_free = 0;
  std::vector<std::uint64_t> taken;
  for (std::int64_t k = 0; k * period <= 3'000'000'000; ++k) {
    // Consumer wake-ups that fall before this publish happen first.
    while (next_free < k * period && sub->unread() > 0) {
      clock.advance_to(Timestamp{next_free});
      const auto newest = topic->last_seq();
      const auto env = sub->take_latest();
      ASSERT_EQ(env->seq, newest);
      taken.push_back(env->seq);
      next_free += busy;
    }
    clock.advance_to(Timestamp{k * period});
    topic->publish(static_cast<int>(k), clock.now(), clock.now());
    if (next_free <= k * period) {
      taken.push_back(sub->take_latest()->seq);
      next_free = k * period + busy;
    }
  }
  ASSERT_GT(taken.size(), 10u);
  bool gap = false;
  for (std::size_t i = 1; i < taken.size(); ++i) {
    ASSERT_GT(taken[i], taken[i - 1]);
    gap = gap || taken[i] > taken[i - 1] + 1;
  }
  EXPECT_TRUE(gap);
  // Oracle: a take at time t sees seq floor(t / period) + 1.
  EXPECT_EQ(taken[1], static_cast<std::uint64_t>(busy / period + 1));
}

TEST(Bus, ConcurrentProducerConsumerNoRedelivery)
{
  WallClock clock;
  Bus bus(clock);
  auto topic = bus.create_topic<int>("c", TopicPolicy::latest());
  auto sub = topic->subscribe();
  std::vector<std::uint64_t> seen;
  {
    std::jthread consumer([&](std::stop_token st) {
      while (!st.stop_requested()) {
        if (auto env = sub->wait_latest(st, 1ms)) {
          seen.push_back(env->seq);
        }
      }
    });
    for (int i = 0; i < 2000; ++i) {
      bus.publish<int>("c", i, clock.now());
    }
    std::this_thread::sleep_for(20ms);
  }
  ASSERT_FALSE(seen.empty());
  for (std::size_t i = 1; i < seen.size(); ++i) {
    ASSERT_GT(seen[i], seen[i - 1]);
  }
  EXPECT_EQ(seen.back(), 2000u);
}

TEST(Bus, WaitHonoursStopToken)
{
  VirtualClock clock;
  Bus bus(clock);
  auto sub = bus.create_topic<int>("c", TopicPolicy::latest())->subscribe();
  std::stop_source src;
  src.request_stop();
  EXPECT_FALSE(sub->wait_next(src.get_token(), 1s));
}

// ---- clocks

TEST(Clock, VirtualClockRefusesToGoBack)
{
  VirtualClock c(Timestamp{10});
  c.advance_to(Timestamp{20});
  EXPECT_EQ(c.now(), Timestamp{20});
  EXPECT_THROW(c.advance_to(Timestamp{19}), OrderingError);
}

TEST(Clock, WallClockMonotone)
{
  WallClock c;
  const auto a = c.now();
  const auto b = c.now();
  EXPECT_GE(b, a);
  EXPECT_GE(a, Timestamp{0});
}

// ---- stage log

TEST(StageLog, HopLatency)
{
  StageLog log;
  log.record_hop(1, "camera", Stage::kCapture, Timestamp{0});
  log.record_hop(1, "camera", Stage::kIngest, Timestamp{12'000'000});
  const auto t = log.times(1);
  EXPECT_EQ(*t[1] - *t[0], Timestamp{12'000'000});
}

TEST(StageLog, EndToEndTelescopes)
{
  StageLog log;
  const std::int64_t ts[] = {0, 15, 557, 557, 562};
  for (std::size_t i = 0; i < 5; ++i) {
    log.record_hop(4, "x", kAllStages[i], Timestamp{ts[i]});
  }
  const auto t = log.times(4);
  Duration sum{0};
  for (std::size_t i = 1; i < 5; ++i) {
    sum += *t[i] - *t[i - 1];
  }
  EXPECT_EQ(sum, *t[4] - *t[0]);
  EXPECT_EQ(log.complete_sequences(), std::vector<std::uint64_t>{4});
}

TEST(StageLog, OrderingViolationsRejected)
{
  StageLog log;
  log.record_hop(1, "c", Stage::kCapture, Timestamp{0});
  log.record_hop(1, "c", Stage::kIngest, Timestamp{10});
  EXPECT_THROW(log.record_hop(1, "o", Stage::kDetectDone, Timestamp{5}), OrderingError);
  EXPECT_THROW(log.record_hop(1, "c", Stage::kIngest, Timestamp{20}), OrderingError);
  EXPECT_THROW(parse_stage("teleport"), ValidationError);
  for (const auto s : kAllStages) {
    EXPECT_EQ(parse_stage(to_string(s)), s);
  }
}

TEST(StageLog, CsvRoundTrip)
{
  StageLog log;
  log.record_hop(1, "camera", Stage::kCapture, Timestamp{0});
  log.record_hop(2, "camera", Stage::kCapture, Timestamp{33});
  log.record_hop(1, "camera", Stage::kIngest, Timestamp{40});
  std::stringstream ss;
  write_stage_csv(ss, log);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kStageCsvHeader);
  EXPECT_EQ(read_stage_csv(ss), log);
  std::stringstream bad(std::string(kStageCsvHeader) + "\n1,camera,capture\n");
  EXPECT_THROW(read_stage_csv(bad), FormatError);
  std::stringstream unknown(std::string(kStageCsvHeader) + "\n1,camera,warp,5\n");
  EXPECT_THROW(read_stage_csv(unknown), FormatError);
}

}  // namespace
}  // namespace oodsim::bus
