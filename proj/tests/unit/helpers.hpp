#pragma once

#include <map>
#include <mutex>
#include <string>

#include <gtest/gtest.h>

#include "hodgekit/corpus.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/hodge.hpp"

namespace hodgekit::testing {

// Hodge systems are costly to build; share them across tests.
inline HodgePtr corpus_system(const std::string& name,
                              MetricScheme scheme = MetricScheme::whitney) {
  static std::mutex mutex;
  static std::map<std::pair<std::string, MetricScheme>, HodgePtr> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{name, scheme}];
  if (!slot) slot = build_hodge_system(build_metric(corpus::by_name(name), scheme));
  return slot;
}

inline double m_norm(const MetricStructure& m, int p, const Eigen::VectorXd& x) {
  return std::sqrt(std::max(x.dot(m.mass(p) * x), 0.0));
}

}  // namespace hodgekit::testing

// Asserts that `statement` throws hodgekit::Error with the given code.
#define EXPECT_HODGE_ERROR(statement, error_code)                          \
  do {                                                                     \
    try {                                                                  \
      statement;                                                           \
      ADD_FAILURE() << "expected " #error_code " from " #statement;        \
    } catch (const ::hodgekit::Error& e_) {                                \
      EXPECT_EQ(e_.code(), ::hodgekit::ErrorCode::error_code) << e_.what(); \
    }                                                                      \
  } while (0)
