#include "commands.hpp"

#include "lvr/errors.hpp"

#include <cstdio>
#include <exception>
#include <string>

namespace {

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR-visual re-localisation toolkit"};
  app.require_subcommand(1);
  std::function<void()> run;
  try {
    run = lvr::cli::register_commands(app);
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    run();
  } catch (const lvr::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(lvr::to_string(e.code())).c_str(),
                 one_line(e.what()).c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", one_line(e.what()).c_str());
    return 1;
  }
  return 0;
}
