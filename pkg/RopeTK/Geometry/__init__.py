from RopeTK.Geometry.cloud import diameter
from RopeTK.Geometry.cloud import fps_select
from RopeTK.Geometry.cloud import Landmark2D
from RopeTK.Geometry.cloud import Landmark3D
from RopeTK.Geometry.cloud import landmark_array
from RopeTK.Geometry.cloud import min_pairwise_distance
from RopeTK.Geometry.cloud import PointCloud
from RopeTK.Geometry.ply import read_ply
from RopeTK.Geometry.ply import write_ply
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import compose
from RopeTK.Geometry.pose import invert
from RopeTK.Geometry.pose import Pose
from RopeTK.Geometry.pose import project
from RopeTK.Geometry.pose import rotation_error
from RopeTK.Geometry.pose import transform
from RopeTK.Geometry.pose import translation_error
from RopeTK.Geometry.pose import unproject
