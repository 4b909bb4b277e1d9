#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <string>

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(QVI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("exit codes") {
    SUBCASE("verification subcommands succeed") {
        CHECK(run_cli("stein-check --seed 3") == 0);
        CHECK(run_cli("grad-check --seed 3") == 0);
    }
    SUBCASE("bad flags exit with 2") {
        CHECK(run_cli("--bogus") == 2);
        CHECK(run_cli("sprinkler --no-such-flag") == 2);
        CHECK(run_cli("sprinkler --method neither") == 2);
        CHECK(run_cli("") == 2); // a subcommand is required
    }
    SUBCASE("runtime failures exit with 1") {
        CHECK(run_cli("lungcancer --network /nonexistent/net.json --epochs 1") == 1);
    }
    SUBCASE("help exits cleanly") {
        CHECK(run_cli("--help") == 0);
    }
}
