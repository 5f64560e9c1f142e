from RopeTK.Metrics.coherence import coherence
from RopeTK.Metrics.coherence import CoherenceReport
from RopeTK.Metrics.distances import accuracy_curve
from RopeTK.Metrics.distances import add_distance
from RopeTK.Metrics.distances import adds_distance
from RopeTK.Metrics.distances import auc
from RopeTK.Metrics.distances import model_distance
from RopeTK.Metrics.distances import pose_correct
from RopeTK.Metrics.distances import PoseDistance
from RopeTK.Metrics.evaluate import evaluate_dataset
from RopeTK.Metrics.evaluate import EvaluationReport
from RopeTK.Metrics.evaluate import ImageResult
from RopeTK.Metrics.evaluate import load_predictions
from RopeTK.Metrics.evaluate import ObjectSummary
from RopeTK.Metrics.evaluate import PredictionRecord
from RopeTK.Metrics.evaluate import predictions_to_dict
from RopeTK.Metrics.evaluate import write_bubble_csv
from RopeTK.Metrics.evaluate import write_curve_csv
from RopeTK.Metrics.evaluate import write_report_csv
from RopeTK.Metrics.evaluate import write_report_json
