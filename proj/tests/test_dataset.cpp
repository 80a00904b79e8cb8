#include <fstream>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "patrec/dataset.hpp"

using namespace patrec;
using testutil::expect_error;

namespace {

DataSet from_text(const std::string& text,
                  const std::optional<std::string>& target = std::nullopt,
                  TargetKind kind = TargetKind::class_labels) {
    std::istringstream in(text);
    return load_csv(in, target, kind, "test.csv");
}

}  // namespace

TEST_CASE("load_csv reads features and typed targets") {
    const DataSet ds = from_text("a,b,label\n1,2,x\n3,4,y\n5,6,x\n", std::string("label"));
    CHECK(ds.n() == 3);
    CHECK(ds.d() == 2);
    CHECK(ds.feature_names() == std::vector<std::string>{"a", "b"});
    CHECK(ds.observations()(1, 0) == 3.0);
    CHECK(ds.observations()(2, 1) == 6.0);
    REQUIRE(ds.has_targets());
    const TargetBlock& t = ds.targets();
    CHECK(t.kind == TargetBlock::Kind::class_labels);
    // string labels are assigned integers in first-appearance order
    CHECK(t.labels == std::vector<int>{0, 1, 0});
    CHECK(t.name_of(0) == "x");
    CHECK(t.name_of(1) == "y");
}

TEST_CASE("load_csv keeps integer labels as written") {
    const DataSet ds = from_text("f,label\n1,7\n2,3\n3,7\n", std::string("label"));
    CHECK(ds.targets().labels == std::vector<int>{7, 3, 7});
    CHECK(ds.targets().label_set == std::vector<int>{3, 7});
}

TEST_CASE("load_csv without a target column yields an unlabeled dataset") {
    const DataSet ds = from_text("a,b\n1,2\n3,4\n");
    CHECK(ds.d() == 2);
    CHECK_FALSE(ds.has_targets());
    // default observation ids are row numbers
    CHECK(ds.observation_ids() == std::vector<std::string>{"0", "1"});
}

TEST_CASE("load_csv handles quoting, CRLF endings and blank lines") {
    const DataSet ds = from_text("\"a\",b,name\r\n1,2,\"x,\"\"1\"\"\"\r\n\n3,4,y\r\n",
                                 std::string("name"));
    CHECK(ds.n() == 2);
    CHECK(ds.feature_names() == std::vector<std::string>{"a", "b"});
    CHECK(ds.targets().name_of(0) == "x,\"1\"");
}

TEST_CASE("load_csv failure modes") {
    SUBCASE("empty input") {
        expect_error(errc::empty_file, [] { from_text(""); });
    }
    SUBCASE("header only") {
        expect_error(errc::empty_file, [] { from_text("a,b\n"); });
    }
    SUBCASE("missing target column") {
        expect_error(errc::missing_column, [] { from_text("a,b\n1,2\n", std::string("c")); });
    }
    SUBCASE("ragged row") {
        expect_error(errc::ragged_rows, [] { from_text("a,b\n1,2\n3\n"); });
    }
    SUBCASE("non-numeric feature cell") {
        expect_error(errc::non_numeric_feature, [] { from_text("a,b\n1,oops\n"); });
    }
    SUBCASE("non-finite feature cell") {
        expect_error(errc::non_numeric_feature, [] { from_text("a,b\n1,inf\n"); });
    }
    SUBCASE("missing file") {
        expect_error(errc::io_error, [] { load_csv("/nonexistent/path.csv"); });
    }
}

TEST_CASE("write_csv and load_csv round-trip doubles exactly") {
    DataSet ds(testutil::gaussian_matrix(20, 3, 99),
               TargetBlock::classes(std::vector<int>(20, 0), {{0, "only"}}));
    std::ostringstream out;
    write_csv(ds, out, "label");
    const DataSet back = from_text(out.str(), std::string("label"));
    CHECK(back.observations() == ds.observations());
    CHECK(back.targets().labels == ds.targets().labels);
}

TEST_CASE("gen_iris matches the bundled file") {
    const DataSet iris = gen_iris();
    CHECK(iris.n() == 150);
    CHECK(iris.d() == 4);
    CHECK(iris.feature_names() ==
          std::vector<std::string>{"sepal_length", "sepal_width", "petal_length",
                                   "petal_width"});
    const DatasetSummary s = summarize(iris);
    REQUIRE(s.n_classes == 3);
    CHECK(s.class_counts.at(0) == 50);
    CHECK(s.class_counts.at(1) == 50);
    CHECK(s.class_counts.at(2) == 50);
    CHECK(s.class_names.at(0) == "setosa");
    CHECK(s.class_names.at(1) == "versicolor");
    CHECK(s.class_names.at(2) == "virginica");
    // spot values from the first and last rows of the file
    CHECK(iris.observations()(0, 0) == 5.1);
    CHECK(iris.observations()(149, 3) == 1.8);

    const DataSet again = gen_iris();
    CHECK(again.observations() == iris.observations());
    CHECK(again.targets().labels == iris.targets().labels);
}

TEST_CASE("relabel_one_vs_rest") {
    const DataSet iris = gen_iris();
    const DataSet binary = relabel_one_vs_rest(iris, "setosa");
    const DatasetSummary s = summarize(binary);
    REQUIRE(s.n_classes == 2);
    CHECK(s.class_counts.at(1) == 50);
    CHECK(s.class_counts.at(0) == 100);
    CHECK(s.class_names.at(1) == "setosa");
    CHECK(s.class_names.at(0) == "rest");
    CHECK(binary.observations() == iris.observations());

    // by integer label, and by the label's decimal text
    CHECK(relabel_one_vs_rest(iris, 2).targets().labels ==
          relabel_one_vs_rest(iris, "virginica").targets().labels);

    expect_error(errc::unknown_class, [&] { relabel_one_vs_rest(iris, "daffodil"); });
    expect_error(errc::unknown_class, [&] { relabel_one_vs_rest(iris, 9); });
}

TEST_CASE("concat_features") {
    const DataSet left = testutil::two_blobs(5, 2, 1.0, 1);
    const DataSet right = left.with_observations(left.observations() * 2.0, {"c", "d"});

    SUBCASE("joins columns left to right") {
        const DataSet joined = concat_features(left, right);
        CHECK(joined.d() == 4);
        CHECK(joined.feature_names() == std::vector<std::string>{"f1", "f2", "c", "d"});
        CHECK(joined.observations().leftCols(2) == left.observations());
        CHECK(joined.observations().rightCols(2) == right.observations());
        CHECK(joined.targets().labels == left.targets().labels);
    }
    SUBCASE("one-sided targets survive") {
        const DataSet joined = concat_features(left.without_targets(), right);
        CHECK(joined.has_targets());
    }
    SUBCASE("row count mismatch") {
        expect_error(errc::row_count_mismatch,
                     [&] { concat_features(left, testutil::unlabeled(3, 2, 2)); });
    }
    SUBCASE("conflicting targets") {
        std::vector<int> flipped(10, 0);
        flipped[0] = 1;
        const DataSet other = left.with_targets(TargetBlock::classes(std::move(flipped)));
        expect_error(errc::target_conflict, [&] { concat_features(left, other); });
    }
}

TEST_CASE("take_rows and retain_features") {
    const DataSet ds = testutil::two_blobs(3, 3, 2.0, 5);

    const DataSet rows = take_rows(ds, {4, 0, 2});
    CHECK(rows.n() == 3);
    CHECK(rows.observations().row(0) == ds.observations().row(4));
    CHECK(rows.observation_ids() == std::vector<std::string>{"4", "0", "2"});
    CHECK(rows.targets().labels == std::vector<int>{0, 1, 1});

    const DataSet cols = retain_features(ds, {2, 0});
    CHECK(cols.feature_names() == std::vector<std::string>{"f3", "f1"});
    CHECK(cols.observations().col(0) == ds.observations().col(2));

    expect_error(errc::index_out_of_range, [&] { take_rows(ds, {6}); });
    expect_error(errc::index_out_of_range, [&] { retain_features(ds, {-1}); });
}

TEST_CASE("csv_last_column reads the header") {
    const auto path = std::filesystem::temp_directory_path() / "patrec_lastcol.csv";
    {
        std::ofstream out(path);
        out << "alpha,beta,species\n1,2,x\n";
    }
    CHECK(csv_last_column(path) == "species");
    std::filesystem::remove(path);
    expect_error(errc::io_error, [&] { csv_last_column(path); });
}
