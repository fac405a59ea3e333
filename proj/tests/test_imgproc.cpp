#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crackpot/imgproc.hpp"
#include "oracles.hpp"

using namespace crackpot;

TEST_CASE("to_grayscale leaves 1-channel images untouched") {
    std::mt19937 gen(7);
    const Image img = oracles::random_image(gen, 9, 5, 1);
    const Image gray = to_grayscale(img);
    CHECK(gray.data == img.data);
}

TEST_CASE("to_grayscale weights sum to one") {
    Image img = Image::make(2, 1, 3);
    img.at(0, 0, 0) = 255; img.at(0, 0, 1) = 255; img.at(0, 0, 2) = 255;
    const Image gray = to_grayscale(img);
    CHECK(gray.at(0, 0) == 255);
    CHECK(gray.at(1, 0) == 0);
}

TEST_CASE("to_grayscale weighted sum, hand-evaluated") {
    Image img = Image::make(1, 1, 3);
    img.at(0, 0, 0) = 100; img.at(0, 0, 1) = 150; img.at(0, 0, 2) = 200;
    // round(29.9 + 88.05 + 22.8) = 141
    CHECK(to_grayscale(img).at(0, 0) == 141);
}

TEST_CASE("to_grayscale output range covers all byte inputs") {
    std::mt19937 gen(11);
    const Image img = oracles::random_image(gen, 32, 32, 3);
    const Image gray = to_grayscale(img);
    for (auto v : gray.data) CHECK(v <= 255);  // u8 by construction; sanity only
    CHECK(gray.channels == 1);
}

TEST_CASE("gaussian_blur preserves constant images") {
    const Image img = Image::make(11, 7, 1, 137);
    for (double sigma : {0.5, 1.0, 3.0}) {
        const Image blurred = gaussian_blur(img, sigma, 2);
        CHECK(blurred.data == img.data);
    }
}

TEST_CASE("gaussian_blur single impulse matches direct 2-D convolution") {
    Image img = Image::make(7, 7, 1, 0);
    img.at(3, 3) = 255;
    const Image blurred = gaussian_blur(img, 1.0, 2);
    const Image ref = oracles::blur2d_ref(img, 1.0, 2);
    CHECK(blurred.data == ref.data);
    // center value = 255 * g(0)^2 for the normalized 1-D kernel
    double sum = 0.0;
    for (int i = -2; i <= 2; ++i) sum += std::exp(-i * i / 2.0);
    const double g0 = 1.0 / sum;
    CHECK(blurred.at(3, 3) == std::lround(255.0 * g0 * g0));
}

TEST_CASE("larger sigma flattens a step edge more") {
    Image img = Image::make(16, 8, 1, 0);
    for (int y = 0; y < 8; ++y)
        for (int x = 8; x < 16; ++x) img.at(x, y) = 255;
    auto max_horizontal_step = [](const Image& m) {
        int best = 0;
        for (int y = 0; y < m.height; ++y)
            for (int x = 1; x < m.width; ++x)
                best = std::max(best, std::abs(int(m.at(x, y)) - int(m.at(x - 1, y))));
        return best;
    };
    const int sharp = max_horizontal_step(gaussian_blur(img, 0.5, 2));
    const int smooth = max_horizontal_step(gaussian_blur(img, 2.0, 2));
    CHECK(smooth < sharp);
}

TEST_CASE("gaussian_blur rejects non-positive sigma") {
    const Image img = Image::make(4, 4, 1);
    CHECK_THROWS_AS(gaussian_blur(img, 0.0, 2), InvalidParameterError);
    CHECK_THROWS_AS(gaussian_blur(img, -1.0, 2), InvalidParameterError);
}

TEST_CASE("canny on a constant image finds nothing") {
    const Image img = Image::make(16, 16, 1, 200);
    CHECK(canny_edges(img, 50, 150).count() == 0);
    CHECK(canny_edges(img, 1, 2).count() == 0);
}

TEST_CASE("canny on a vertical step finds one 1-pixel line beside the step") {
    Image img = Image::make(16, 16, 1, 0);
    for (int y = 0; y < 16; ++y)
        for (int x = 8; x < 16; ++x) img.at(x, y) = 255;
    const BinaryMask edges = canny_edges(img, 50, 100);
    // all edge pixels in a single column, the first bright one
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            CHECK(edges.at(x, y) == ((x == 8 && y >= 1 && y <= 14) ? 1 : 0));
}

TEST_CASE("canny with unreachable high threshold keeps nothing") {
    Image img = Image::make(16, 16, 1, 0);
    for (int y = 0; y < 16; ++y)
        for (int x = 8; x < 16; ++x) img.at(x, y) = 255;
    CHECK(canny_edges(img, 50, 100000).count() == 0);
}

TEST_CASE("canny rejects low >= high") {
    const Image img = Image::make(8, 8, 1);
    CHECK_THROWS_AS(canny_edges(img, 100, 100), InvalidParameterError);
    CHECK_THROWS_AS(canny_edges(img, 150, 50), InvalidParameterError);
}

TEST_CASE("canny output is a subset of the magnitude >= low support") {
    std::mt19937 gen(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Image img = oracles::random_image(gen, 32, 32, 1);
        CannyDebug dbg;
        const BinaryMask edges = canny_edges(img, 60, 160, &dbg);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                if (edges.at(x, y))
                    CHECK(dbg.magnitude[static_cast<std::size_t>(y) * 32 + x] >= 60);
    }
}

TEST_CASE("canny matches the straight-line reference on random images") {
    std::mt19937 gen(33);
    for (int trial = 0; trial < 50; ++trial) {
        const Image img = oracles::random_image(gen, 32, 32, 1);
        const int low = 20 + int(gen() % 100);
        const int high = low + 1 + int(gen() % 200);
        const BinaryMask mine = canny_edges(img, low, high);
        const BinaryMask ref = oracles::canny_ref(img, low, high);
        REQUIRE(mine.bits == ref.bits);
    }
}

TEST_CASE("dilate grows a point into centered squares") {
    BinaryMask mask = BinaryMask::make(9, 9);
    mask.at(4, 4) = 1;
    const BinaryMask one = dilate(mask, 1);
    CHECK(one.count() == 9);
    for (int y = 3; y <= 5; ++y)
        for (int x = 3; x <= 5; ++x) CHECK(one.at(x, y) == 1);
    const BinaryMask two = dilate(mask, 2);
    CHECK(two.count() == 25);
    CHECK(dilate(mask, 0).bits == mask.bits);
}

TEST_CASE("dilate of an empty mask stays empty") {
    const BinaryMask mask = BinaryMask::make(12, 8);
    CHECK(dilate(mask, 5).count() == 0);
}

TEST_CASE("dilate is monotone in the iteration count") {
    std::mt19937 gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask mask = oracles::random_mask(gen, 24, 24, 0.1);
        BinaryMask prev = mask;
        for (int k = 1; k <= 3; ++k) {
            const BinaryMask next = dilate(mask, k);
            for (std::size_t i = 0; i < next.bits.size(); ++i)
                if (prev.bits[i]) CHECK(next.bits[i]);
            prev = next;
        }
    }
}

TEST_CASE("dilate matches the per-pixel reference") {
    std::mt19937 gen(91);
    for (int trial = 0; trial < 50; ++trial) {
        const BinaryMask mask = oracles::random_mask(gen, 32, 32, 0.15);
        const int iters = int(gen() % 4);
        CHECK(dilate(mask, iters).bits == oracles::dilate_ref(mask, iters).bits);
    }
}

TEST_CASE("mask_and identity, absorbing and disjoint cases") {
    std::mt19937 gen(17);
    const BinaryMask any = oracles::random_mask(gen, 10, 10, 0.4);
    const BinaryMask full = BinaryMask::make(10, 10, true);
    const BinaryMask empty = BinaryMask::make(10, 10, false);
    CHECK(mask_and(full, any).bits == any.bits);
    CHECK(mask_and(empty, any).count() == 0);

    BinaryMask a = BinaryMask::make(4, 4), b = BinaryMask::make(4, 4);
    a.at(0, 0) = 1;
    b.at(3, 3) = 1;
    CHECK(mask_and(a, b).count() == 0);
}

TEST_CASE("mask_and commutative and associative") {
    std::mt19937 gen(29);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask a = oracles::random_mask(gen, 16, 16, 0.5);
        const BinaryMask b = oracles::random_mask(gen, 16, 16, 0.5);
        const BinaryMask c = oracles::random_mask(gen, 16, 16, 0.5);
        CHECK(mask_and(a, b).bits == mask_and(b, a).bits);
        CHECK(mask_and(mask_and(a, b), c).bits == mask_and(a, mask_and(b, c)).bits);
    }
}

TEST_CASE("mask_and rejects mismatched dimensions") {
    CHECK_THROWS_AS(mask_and(BinaryMask::make(4, 4), BinaryMask::make(4, 5)),
                    InvalidParameterError);
}

TEST_CASE("extract_boxes on an empty mask") {
    CHECK(extract_boxes(BinaryMask::make(20, 20), 1).empty());
}

TEST_CASE("extract_boxes finds two solid blobs in sorted order") {
    BinaryMask mask = BinaryMask::make(20, 20);
    for (int y = 1; y <= 3; ++y)
        for (int x = 1; x <= 3; ++x) mask.at(x, y) = 1;
    for (int y = 10; y <= 12; ++y)
        for (int x = 10; x <= 12; ++x) mask.at(x, y) = 1;
    const auto boxes = extract_boxes(mask, 4);
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0] == BoundingBox{1, 1, 3, 3});
    CHECK(boxes[1] == BoundingBox{10, 10, 3, 3});
}

TEST_CASE("extract_boxes treats a diagonal as one 8-connected component") {
    BinaryMask mask = BinaryMask::make(10, 10);
    for (int i = 0; i < 5; ++i) mask.at(2 + i, 2 + i) = 1;
    const auto boxes = extract_boxes(mask, 1);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0] == BoundingBox{2, 2, 5, 5});
    CHECK(oracles::components_ref(mask, 1).size() == 1);
}

TEST_CASE("extract_boxes matches the flood-fill reference on random masks") {
    std::mt19937 gen(55);
    for (int trial = 0; trial < 50; ++trial) {
        const BinaryMask mask = oracles::random_mask(gen, 32, 32, 0.25);
        const int min_area = 1 + int(gen() % 6);
        const auto mine = extract_boxes(mask, min_area);
        const auto ref = oracles::components_ref(mask, min_area);
        REQUIRE(mine.size() == ref.size());
        for (std::size_t i = 0; i < mine.size(); ++i) CHECK(mine[i] == ref[i]);
    }
}

TEST_CASE("extract_boxes covers every large-component bit") {
    std::mt19937 gen(77);
    const BinaryMask mask = oracles::random_mask(gen, 32, 32, 0.3);
    const auto boxes = extract_boxes(mask, 3);
    const auto all = extract_boxes(mask, 1);
    // every box of a kept component lies inside some box of the unfiltered set
    for (const auto& box : boxes) {
        bool found = false;
        for (const auto& big : all)
            if (big.contains(box)) found = true;
        CHECK(found);
    }
}

TEST_CASE("crop_resize identity crop is byte-exact") {
    std::mt19937 gen(13);
    const Image img = oracles::random_image(gen, 80, 70, 3);
    const BoundingBox box{8, 4, 64, 64};
    const CandidatePatch patch = crop_resize(img, box, 64);
    CHECK(patch.source_box == box);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(patch.pixels.at(x, y, c) == img.at(8 + x, 4 + y, c));
}

TEST_CASE("crop_resize keeps constants constant") {
    const Image img = Image::make(33, 21, 1, 88);
    for (int out : {1, 3, 17, 64}) {
        const CandidatePatch patch = crop_resize(img, {2, 3, 29, 15}, out);
        for (auto v : patch.pixels.data) CHECK(v == 88);
    }
}

TEST_CASE("crop_resize 2x2 to 4x4 matches the hand-evaluated bilinear values") {
    Image img = Image::make(2, 2, 1);
    img.at(0, 0) = 0; img.at(1, 0) = 100;
    img.at(0, 1) = 100; img.at(1, 1) = 200;
    const CandidatePatch patch = crop_resize(img, {0, 0, 2, 2}, 4);
    // source coordinates per axis: -0.25 -> 0, 0.25, 0.75, 1.25 -> 1
    const int expected[4][4] = {
        {0, 25, 75, 100},
        {25, 50, 100, 125},
        {75, 100, 150, 175},
        {100, 125, 175, 200},
    };
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) CHECK(patch.pixels.at(x, y) == expected[y][x]);
}

TEST_CASE("crop_resize rejects out-of-bounds boxes") {
    const Image img = Image::make(10, 10, 1);
    CHECK_THROWS_AS(crop_resize(img, {5, 5, 6, 6}, 8), InvalidParameterError);
    CHECK_THROWS_AS(crop_resize(img, {-1, 0, 4, 4}, 8), InvalidParameterError);
    CHECK_THROWS_AS(crop_resize(img, {0, 0, 0, 4}, 8), InvalidParameterError);
}
