import java.util.Arrays;

public class MoveZeroes {
    static void shift(int[] nums) {
        int write = 0;
        for (int read = 0; read < nums.length; read++) {
            if (nums[read] != 0) {
                nums[write] = nums[read];
                write++;
            }
        }
        while (write < nums.length) {
            nums[write] = 0;
            write++;
        }
    }

    public static int main(String[] args) {
        int[] nums = {0, 1, 0, 3, 12};
        shift(nums);
        int first = nums[0];
        int last = nums[nums.length - 1];
        int result = first * 100 + last;
        return result;
    }
}
