"""
Tests for the HTTP detector service.
"""

import base64
import unittest

from fastapi.testclient import TestClient

from bulbpatch.api.fastapi_app import create_app
from bulbpatch.core.detect import ToyTemplateDetector
from bulbpatch.core.imaging import GrayImage
from bulbpatch.integrations.wire import build_request, decode_response, request_image
from bulbpatch.tests.factories import CannedDetector, blob_image, detection


class TestDetectorService(unittest.TestCase):

    def setUp(self):
        self.detector = ToyTemplateDetector()
        self.client = TestClient(create_app(self.detector))
        self.client.__enter__()
        self.addCleanup(self.client.__exit__, None, None, None)

    def test_health(self):
        response = self.client.get("/health")
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertEqual(body["status"], "healthy")
        self.assertEqual(body["detector"], "toy")
        self.assertEqual(body["capabilities"], ["image_gradients", "scores_only"])
        self.assertEqual(body["operating_threshold"], 0.5)

    def test_detect_matches_in_process_adapter(self):
        image, box = blob_image()
        request = build_request(11, image)
        response = self.client.post("/detect", json=request.model_dump())
        self.assertEqual(response.status_code, 200)
        detections = decode_response(response.content, 11)
        expected = self.detector.detect(request_image(request))
        self.assertEqual(len(detections), len(expected))
        self.assertEqual(detections[0].box, box)
        self.assertAlmostEqual(detections[0].objectness, expected[0].objectness, places=9)

    def test_pixel_count_mismatch_is_bad_request(self):
        payload = {"id": 3, "h": 4, "w": 4, "pixels": base64.b64encode(bytes(15)).decode("ascii")}
        response = self.client.post("/detect", json=payload)
        self.assertEqual(response.status_code, 400)
        self.assertIn("expected 16 pixel bytes", response.json()["detail"])

    def test_invalid_base64_is_bad_request(self):
        response = self.client.post("/detect", json={"id": 3, "h": 1, "w": 1, "pixels": "!!"})
        self.assertEqual(response.status_code, 400)

    def test_schema_violation_rejected(self):
        response = self.client.post("/detect", json={"id": 3, "h": 0, "w": 4, "pixels": ""})
        self.assertEqual(response.status_code, 422)


class TestDetectorFailures(unittest.TestCase):

    def test_adapter_failure_reported(self):
        detector = CannedDetector([detection(0, 0, 10, 20, 0.9)], name="flaky", fail=True)
        with TestClient(create_app(detector)) as client:
            image = GrayImage.constant(8, 8, 0.3)
            response = client.post("/detect", json=build_request(1, image).model_dump())
        self.assertEqual(response.status_code, 500)
        self.assertIn("[flaky]", response.json()["detail"])


if __name__ == "__main__":
    unittest.main()
