#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>
#include <sstream>

#include "jnr/pipeline/commands.hpp"

using namespace jnr;
namespace fs = std::filesystem;

// The network must be able to memorise a handful of tracklets.
TEST(Overfit, TenTrackletsReachLowLoss) {
  const fs::path root = fs::temp_directory_path() / "jnr_test_overfit";
  fs::remove_all(root);
  const RunConfig c = load_config(fs::path(JNR_SOURCE_DIR) / "configs" / "overfit.conf");
  std::ostringstream log;
  cmd_synth(c, root / "data", log);
  const auto s = cmd_train(c, root / "data", root / "ck.bin", {}, log);
  fs::remove_all(root);
  ASSERT_EQ(s.tracklets, 10);
  ASSERT_GE(s.losses.size(), 20u);
  const double tail = std::accumulate(s.losses.end() - 20, s.losses.end(), 0.0) / 20.0;
  EXPECT_LT(tail, 0.05);
}
