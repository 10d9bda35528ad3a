"""
Behavioral models of the rain sensor board and the servo
"""
from .rain_sensor import (
    AO_NET, DO_NET, HEAVY_NET, WETNESS_NET, Comparator, RainSensor,
    RainSensorState, SensorInputError, analog_out, comparator,
    sensor_resistance,
)
from .servo import (
    ANGLE_NET, PWM_NET, Servo, ServoConfig, ServoState, decode_pulse_width,
    servo_kinematics,
)

__all__ = [
    'ANGLE_NET', 'AO_NET', 'Comparator', 'DO_NET', 'HEAVY_NET', 'PWM_NET',
    'RainSensor', 'RainSensorState', 'SensorInputError', 'Servo',
    'ServoConfig', 'ServoState', 'WETNESS_NET', 'analog_out', 'comparator',
    'decode_pulse_width', 'sensor_resistance', 'servo_kinematics',
]
