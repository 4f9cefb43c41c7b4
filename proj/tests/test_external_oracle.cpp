#include <doctest.h>

#include <cstdlib>
#include <string>

#include "molexp/oracle/external.hpp"
#include "molexp/oracle/similarity.hpp"

using namespace molexp::oracle;

namespace {

std::string stub_path() {
    if (const char* p = std::getenv("ORACLE_STUB")) return p;
    return "./tests/oracle_stub";
}

}  // namespace

TEST_CASE("external oracle round trip with constant stub") {
    ExternalOracle half({stub_path() + " const 0.5", 10.0});
    CHECK(half.score("CCO") == doctest::Approx(0.5));
    CHECK(half.score("c1ccccc1") == doctest::Approx(0.5));

    ExternalOracle one({stub_path() + " const 1.0", 10.0});
    const auto batch = one.score_batch({"C", "CC", "CCC"});
    REQUIRE(batch.size() == 3);
    for (double v : batch) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("external levenshtein stub matches in-process oracle bit-exactly") {
    const std::string target = "CC(=O)Nc1ccc(O)cc1";
    ExternalOracle ext({stub_path() + " leven '" + target + "'", 10.0});
    for (const std::string m : {"CCO", "CC(=O)N", "CC(=O)Nc1ccc(O)cc1", "c1ccsc1"}) {
        const double in_process = levenshtein_similarity(m, target);
        CHECK(ext.score(m) == in_process);  // bit-exact: stub prints %.17g
    }
}

TEST_CASE("external oracle timeout") {
    ExternalOracle silent({stub_path() + " silent", 0.3});
    try {
        silent.score("CCO");
        FAIL("expected timeout");
    } catch (const OracleError& e) {
        CHECK(e.kind() == OracleError::Kind::Timeout);
    }
}

TEST_CASE("external oracle malformed output") {
    ExternalOracle garbage({stub_path() + " garbage", 5.0});
    try {
        garbage.score("CCO");
        FAIL("expected malformed-output error");
    } catch (const OracleError& e) {
        CHECK(e.kind() == OracleError::Kind::MalformedOutput);
    }
}
