#pragma once

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <thread>

#include <gtest/gtest.h>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"
#include "labflow/knowledge/knowledge_base.hpp"
#include "labflow/world/scenario.hpp"

namespace labflow::testing {

inline std::filesystem::path data_dir() { return LABFLOW_TEST_DATA_DIR; }
inline std::filesystem::path fixtures_dir() { return LABFLOW_TEST_FIXTURES_DIR; }
inline std::filesystem::path golden_dir() { return LABFLOW_TEST_GOLDEN_DIR; }

inline std::filesystem::path scenario_path(const std::string& name) { return data_dir() / "scenarios" / (name + ".json"); }
inline world::Scenario scenario(const std::string& name) { return world::load_scenario(scenario_path(name)); }

inline std::shared_ptr<const knowledge::KnowledgeBase> default_kb() {
  static auto kb = std::make_shared<const knowledge::KnowledgeBase>(
      knowledge::load_knowledge_base(data_dir() / "knowledge_base.json"));
  return kb;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("labflow-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Loopback HTTP server for exercising remote backends.
class StubServer {
 public:
  httplib::Server server;

  void start() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }
  int port() const { return port_; }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  int port_ = 0;
  std::thread thread_;
};

template <typename F>
::testing::AssertionResult throws_code(F&& f, ErrorCode expected) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == expected) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << error_code_name(e.code()) << " (" << e.what() << "), expected "
                                         << error_code_name(expected);
  } catch (const std::exception& e) {
    return ::testing::AssertionFailure() << "threw non-labflow exception: " << e.what();
  }
  return ::testing::AssertionFailure() << "did not throw, expected " << error_code_name(expected);
}

#define EXPECT_CODE(stmt, code) EXPECT_TRUE(::labflow::testing::throws_code([&] { stmt; }, ::labflow::ErrorCode::code))

inline std::string read_file(const std::filesystem::path& p) { return read_text_file(p); }

}  // namespace labflow::testing
