// Copyright 2026 The qvr Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qvr {

inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::vector<std::uint8_t>& v) {
  return fnv1a64(v.data(), v.size());
}

struct LoopbackResult {
  std::int64_t bytes = 0;
  double wall_latency_s = 0.0;
  std::uint64_t sent_hash = 0;
  std::uint64_t received_hash = 0;
};

// Real-socket integration path: push the payload through a local stream
// socket pair on a writer thread and read it back. Used only by integration
// tests; the simulator's channel stays a pure model.
inline LoopbackResult loopback_transport(const std::vector<std::uint8_t>& payload) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw std::runtime_error("socketpair failed");

  const auto start = std::chrono::steady_clock::now();
  std::thread writer([&payload, fd = fds[0]]() {
    std::size_t off = 0;
    while (off < payload.size()) {
      const ssize_t n = ::write(fd, payload.data() + off, payload.size() - off);
      if (n <= 0) break;
      off += static_cast<std::size_t>(n);
    }
    ::close(fd);
  });

  std::vector<std::uint8_t> received;
  received.reserve(payload.size());
  std::uint8_t buf[65536];
  for (;;) {
    const ssize_t n = ::read(fds[1], buf, sizeof buf);
    if (n <= 0) break;
    received.insert(received.end(), buf, buf + n);
  }
  ::close(fds[1]);
  writer.join();
  const auto stop = std::chrono::steady_clock::now();

  LoopbackResult r;
  r.bytes = static_cast<std::int64_t>(received.size());
  r.wall_latency_s = std::chrono::duration<double>(stop - start).count();
  r.sent_hash = fnv1a64(payload);
  r.received_hash = fnv1a64(received);
  return r;
}

}  // namespace qvr
