from RopeTK.Solvers.landmark_filter import filter_landmarks
from RopeTK.Solvers.landmark_filter import FilterConfig
from RopeTK.Solvers.landmark_filter import FilteredCorrespondences
from RopeTK.Solvers.landmark_filter import passthrough_correspondences
from RopeTK.Solvers.p3p import align_points
from RopeTK.Solvers.p3p import minimal_pnp
from RopeTK.Solvers.ransac import PnpResult
from RopeTK.Solvers.ransac import ransac_pnp
from RopeTK.Solvers.ransac import RansacConfig
from RopeTK.Solvers.ransac import reprojection_errors
from RopeTK.Solvers.refine import perturb_pose
from RopeTK.Solvers.refine import refine_pose
from RopeTK.Solvers.refine import reprojection_jacobian
from RopeTK.Solvers.refine import reprojection_residuals
