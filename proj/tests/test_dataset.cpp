#include <doctest.h>

#include <cmath>

#include "diffest/dataset.hpp"
#include "helpers.hpp"

using diffest::Error;
using helpers::TempFile;

TEST_CASE("load_embeddings accepts unit vectors and maps labels in file order") {
    TempFile f("emb.csv");
    f.write("id,label,e0,e1\nc1,a,1,0\nc2,a,0,1\nc3,b,0.6,0.8\n");
    const auto data = diffest::load_embeddings(f.path());
    CHECK(data.size() == 3);
    CHECK(data.dim() == 2);
    CHECK(data.class_names == std::vector<std::string>{"a", "b"});
    CHECK(data.labels == std::vector<int>{0, 0, 1});
    CHECK(data.case_ids == std::vector<std::string>{"c1", "c2", "c3"});
    for (std::size_t i = 0; i < 3; ++i) {
        double sumsq = 0.0;
        for (const double v : data.embeddings.row(i)) sumsq += v * v;
        CHECK(std::abs(std::sqrt(sumsq) - 1.0) <= 1e-6);
    }
    CHECK(data.embeddings(2, 0) == 0.6);
    CHECK(data.embeddings(2, 1) == 0.8);
}

TEST_CASE("load_embeddings re-normalizes off-unit rows") {
    TempFile f("emb.csv");
    f.write("id,label,e0,e1\nc1,a,2,0\n");
    const auto data = diffest::load_embeddings(f.path());
    CHECK(data.embeddings(0, 0) == 1.0);
    CHECK(data.embeddings(0, 1) == 0.0);
}

TEST_CASE("load_embeddings rejects bad rows") {
    TempFile f("emb.csv");
    SUBCASE("zero vector") {
        f.write("id,label,e0,e1\nc1,a,0,0\n");
        CHECK_THROWS_WITH_AS(diffest::load_embeddings(f.path()),
                             doctest::Contains("zero-norm embedding"), Error);
    }
    SUBCASE("duplicate id") {
        f.write("id,label,e0,e1\nc1,a,1,0\nc1,b,0,1\n");
        CHECK_THROWS_WITH_AS(diffest::load_embeddings(f.path()),
                             doctest::Contains("duplicate id"), Error);
    }
    SUBCASE("empty label") {
        f.write("id,label,e0,e1\nc1,,1,0\n");
        CHECK_THROWS_WITH_AS(diffest::load_embeddings(f.path()),
                             doctest::Contains("empty label"), Error);
    }
    SUBCASE("reserved label") {
        f.write("id,label,e0,e1\nc1,unknown,1,0\n");
        CHECK_THROWS_WITH_AS(diffest::load_embeddings(f.path()), doctest::Contains("reserved"),
                             Error);
    }
    SUBCASE("non-numeric coordinate") {
        f.write("id,label,e0,e1\nc1,a,x,0\n");
        CHECK_THROWS_WITH_AS(diffest::load_embeddings(f.path()),
                             doctest::Contains("non-numeric"), Error);
    }
    SUBCASE("ragged row") {
        f.write("id,label,e0,e1\nc1,a,1\n");
        CHECK_THROWS_WITH_AS(diffest::load_embeddings(f.path()),
                             doctest::Contains("expected 4 fields"), Error);
    }
    SUBCASE("bad header") {
        f.write("id,label,x0,x1\nc1,a,1,0\n");
        CHECK_THROWS_WITH_AS(diffest::load_embeddings(f.path()), doctest::Contains("header"),
                             Error);
    }
}

TEST_CASE("embeddings write/load round-trip is exact") {
    TempFile f("emb.csv");
    f.write("id,label,e0,e1,e2\n"
            "c1,a,0.1,-0.7,0.3\n"
            "c2,b,0.577,0.577,0.577\n"
            "c3,a,-1,0,0\n");
    const auto original = diffest::load_embeddings(f.path());
    TempFile g("emb2.csv");
    diffest::write_embeddings(original, g.path());
    const auto reread = diffest::load_embeddings(g.path());
    REQUIRE(reread.size() == original.size());
    CHECK(reread.case_ids == original.case_ids);
    CHECK(reread.labels == original.labels);
    CHECK(reread.class_names == original.class_names);
    for (std::size_t i = 0; i < original.embeddings.data.size(); ++i) {
        CHECK(reread.embeddings.data[i] == original.embeddings.data[i]);
    }

    // Byte-stable as well: writing the re-read dataset gives the same file.
    TempFile h("emb3.csv");
    diffest::write_embeddings(reread, h.path());
    CHECK(g.read() == h.read());
}

TEST_CASE("load_annotations parses records and validates") {
    const std::vector<std::string> classes = {"mel", "nev"};
    TempFile f("ann.csv");
    SUBCASE("well-formed rows") {
        f.write("case_id,rater_id,response,certainty\n"
                "c1,r1,mel,high\n"
                "c1,r2,unknown,\n");
        const auto table = diffest::load_annotations(f.path(), classes);
        REQUIRE(table.records.size() == 2);
        CHECK(table.records[0].response == "mel");
        CHECK(table.records[0].certainty == diffest::Certainty::high);
        CHECK(table.records[1].response == "unknown");
        CHECK(!table.records[1].certainty.has_value());
    }
    SUBCASE("unknown response class") {
        f.write("case_id,rater_id,response,certainty\nc1,r1,xyz,high\n");
        CHECK_THROWS_WITH_AS(diffest::load_annotations(f.path(), classes),
                             doctest::Contains("unknown response class"), Error);
    }
    SUBCASE("unknown certainty token") {
        f.write("case_id,rater_id,response,certainty\nc1,r1,mel,sure\n");
        CHECK_THROWS_WITH_AS(diffest::load_annotations(f.path(), classes),
                             doctest::Contains("certainty"), Error);
    }
    SUBCASE("duplicate (case, rater) pair") {
        f.write("case_id,rater_id,response,certainty\nc1,r1,mel,high\nc1,r1,nev,low\n");
        CHECK_THROWS_WITH_AS(diffest::load_annotations(f.path(), classes),
                             doctest::Contains("duplicate (case, rater)"), Error);
    }
}

TEST_CASE("annotations round-trip through write_annotations") {
    const std::vector<std::string> classes = {"a", "b"};
    TempFile f("ann.csv");
    f.write("case_id,rater_id,response,certainty\n"
            "c1,r1,a,moderate\n"
            "c2,r1,unknown,\n"
            "c1,r2,b,very_low\n");
    const auto table = diffest::load_annotations(f.path(), classes);
    TempFile g("ann2.csv");
    diffest::write_annotations(table, g.path());
    CHECK(f.read() == g.read());
}

TEST_CASE("load_probabilities tolerance rules") {
    TempFile f("prob.csv");
    SUBCASE("exact row accepted unchanged") {
        f.write("id,label,p0,p1\nc1,0,0.7,0.3\n");
        const auto m = diffest::load_probabilities(f.path());
        CHECK(m.probs(0, 0) == 0.7);
        CHECK(m.probs(0, 1) == 0.3);
        CHECK(m.labels[0] == 0);
    }
    SUBCASE("small drift renormalized to sum 1") {
        f.write("id,label,p0,p1\nc1,0,0.7000005,0.3\n");
        const auto m = diffest::load_probabilities(f.path());
        CHECK(m.probs(0, 0) + m.probs(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.probs(0, 0) == doctest::Approx(0.7).epsilon(1e-5));
    }
    SUBCASE("row sum out of tolerance") {
        f.write("id,label,p0,p1\nc1,0,0.9,0.3\n");
        CHECK_THROWS_WITH_AS(diffest::load_probabilities(f.path()),
                             doctest::Contains("out of tolerance"), Error);
    }
    SUBCASE("negative probability") {
        f.write("id,label,p0,p1\nc1,0,1.2,-0.2\n");
        CHECK_THROWS_WITH_AS(diffest::load_probabilities(f.path()),
                             doctest::Contains("negative probability"), Error);
    }
    SUBCASE("label outside column range") {
        f.write("id,label,p0,p1\nc1,2,0.5,0.5\n");
        CHECK_THROWS_WITH_AS(diffest::load_probabilities(f.path()),
                             doctest::Contains("outside [0, 2)"), Error);
    }
}

TEST_CASE("scores files group by method and round-trip") {
    TempFile f("scores.csv");
    const diffest::DifficultyVector a{"m1", {"c1", "c2"}, {0.25, 0.5}};
    const diffest::DifficultyVector b{"m2", {"c1", "c2"}, {0.1, 1.0 / 3.0}};
    diffest::write_scores({a, b}, f.path());
    const auto methods = diffest::load_scores(f.path());
    REQUIRE(methods.size() == 2);
    CHECK(methods[0].method_name == "m1");
    CHECK(methods[1].method_name == "m2");
    CHECK(methods[1].scores[1] == 1.0 / 3.0);

    SUBCASE("duplicate id within a method") {
        f.write("id,method,score\nc1,m,0.1\nc1,m,0.2\n");
        CHECK_THROWS_WITH_AS(diffest::load_scores(f.path()), doctest::Contains("duplicate id"),
                             Error);
    }
    SUBCASE("non-finite score rejected on write") {
        const diffest::DifficultyVector bad{"m", {"c1"}, {std::nan("")}};
        TempFile g("bad.csv");
        CHECK_THROWS_WITH_AS(diffest::write_scores(bad, g.path()),
                             doctest::Contains("non-finite"), Error);
    }
}

TEST_CASE("load_labels reads the first two columns of any id,label file") {
    TempFile f("emb.csv");
    f.write("id,label,e0,e1\nc1,a,1,0\nc2,b,0,1\n");
    const auto labels = diffest::load_labels(f.path());
    CHECK(labels.at("c1") == "a");
    CHECK(labels.at("c2") == "b");
}

TEST_CASE("loading preserves file order") {
    TempFile f("emb.csv");
    f.write("id,label,e0\nz,a,1\ny,a,-1\nx,b,1\n");
    const auto data = diffest::load_embeddings(f.path());
    CHECK(data.case_ids == std::vector<std::string>{"z", "y", "x"});
}
