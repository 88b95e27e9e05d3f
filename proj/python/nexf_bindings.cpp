// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

// Thin Python surface over the C++ core: the CLI entry point, image metrics,
// fusion, the synthetic scene and trained-model queries. Images cross the
// boundary as float64 arrays of shape (H, W, C).

#include <nexf/cli.hpp>
#include <nexf/evaluate.hpp>
#include <nexf/fusion.hpp>
#include <nexf/objectives.hpp>
#include <nexf/scene.hpp>
#include <nexf/trainer.hpp>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace nexf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ImageBuffer to_image(const Array &a) {
    if (a.ndim() != 2 && a.ndim() != 3)
        throw py::value_error("expected an (H, W) or (H, W, C) array");
    const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
    ImageBuffer img(w, h, c);
    std::copy(a.data(), a.data() + a.size(), img.data.begin());
    return img;
}

Array to_array(const ImageBuffer &img) {
    Array out(img.channels == 1 ? std::vector<py::ssize_t>{img.height, img.width}
                                : std::vector<py::ssize_t>{img.height, img.width, img.channels});
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
}

std::vector<ImageBuffer> to_stack(const std::vector<Array> &arrays) {
    std::vector<ImageBuffer> stack;
    for (const Array &a : arrays)
        stack.push_back(to_image(a));
    return stack;
}

RigConfig rig(int width, int height) {
    RigConfig r;
    r.width = width;
    r.height = height;
    return r;
}

}  // namespace

PYBIND11_MODULE(_nexf, m) {
    m.doc() = "Neural exposure fields, desk-scale reference implementation";

    py::register_exception<Error>(m, "NexfError", PyExc_RuntimeError);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "nexf");
            std::vector<const char *> argv;
            for (const std::string &a : args)
                argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the nexf command line; returns (exit_code, stdout, stderr).");

    m.def("psnr", [](const Array &a, const Array &b) { return psnr(to_image(a), to_image(b)); });
    m.def("ssim", [](const Array &a, const Array &b) { return ssim(to_image(a), to_image(b)); });
    m.def("mse_reduction", &mse_reduction, py::arg("baseline_psnr"), py::arg("method_psnr"));
    m.def("mean_well_exposedness",
          [](const Array &a, double sigma) { return mean_well_exposedness(to_image(a), sigma); },
          py::arg("image"), py::arg("sigma") = 0.2);
    m.def(
        "mertens_fuse",
        [](const std::vector<Array> &stack, double sigma) {
            FusionConfig cfg;
            cfg.sigma = sigma;
            return to_array(mertens_fuse(to_stack(stack), cfg));
        },
        py::arg("stack"), py::arg("sigma") = 0.2);
    m.def(
        "pixel_weight",
        [](std::array<double, 3> rgb, double sigma_exp, double lambda_exp, double lambda_sat) {
            WeightConfig w;
            w.sigma_exp = sigma_exp;
            w.lambda_exp = lambda_exp;
            w.lambda_sat = lambda_sat;
            return pixel_weight(rgb, w);
        },
        py::arg("rgb"), py::arg("sigma_exp") = 0.05, py::arg("lambda_exp") = 0.1, py::arg("lambda_sat") = 1.0);

    m.def(
        "capture_ldr", [](const Array &hdr, double exposure) { return to_array(capture_ldr(to_image(hdr), exposure)); },
        py::arg("hdr"), py::arg("exposure"));
    m.def(
        "two_region_hdr",
        [](int view, int width, int height, int samples) {
            const auto cams = rig_test_cameras(rig(width, height));
            if (view < 0 || view >= static_cast<int>(cams.size()))
                throw py::index_error("test view out of range");
            return to_array(render_hdr(two_region_scene(), cams[static_cast<std::size_t>(view)], samples));
        },
        py::arg("view") = 0, py::arg("width") = 64, py::arg("height") = 64, py::arg("samples") = 256,
        "Ground-truth HDR render of the two-region scene from a test camera.");

    py::class_<Model>(m, "Model")
        .def_static(
            "load", [](const std::string &path) { return load_checkpoint(path).model; }, py::arg("path"))
        .def(
            "render",
            [](const Model &model, int view, std::optional<double> exposure, int width, int height) {
                const auto cams = rig_test_cameras(rig(width, height));
                if (view < 0 || view >= static_cast<int>(cams.size()))
                    throw py::index_error("test view out of range");
                const RenderMode mode = exposure ? RenderMode::at_exposure(*exposure) : RenderMode::nexf();
                return to_array(render_view(model, cams[static_cast<std::size_t>(view)], mode));
            },
            py::arg("view") = 0, py::arg("exposure") = py::none(), py::arg("width") = 64, py::arg("height") = 64,
            "Renders a test camera, following the exposure field unless an exposure is given.")
        .def(
            "exposure",
            [](const Model &model, const Array &points) {
                if (points.ndim() != 2 || points.shape(1) != 3)
                    throw py::value_error("expected an (N, 3) array");
                const Mat x = Eigen::Map<const Mat>(points.data(), points.shape(0), 3);
                const Mat e = exposure_forward(model.params, model.exposure, x);
                Array out(std::vector<py::ssize_t>{points.shape(0)});
                std::copy(e.data(), e.data() + e.size(), out.mutable_data());
                return out;
            },
            py::arg("points"), "Exposure-field values at world points.")
        .def_property_readonly("num_params", [](const Model &model) { return model.params.size(); });
}
